#include "cvi/diagnostics.hpp"

#include "cvi/errors.hpp"
#include "cvi/smoothed_map.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cvi {

double probe_fd_step(double x) { return 1e-4 * (1.0 + std::abs(x)); }

namespace {

constexpr double kMaxGridPoints = 2e6;

// Calls fn on every point of a tensor grid with `points` nodes per axis.
template <typename Fn>
void for_each_grid_point(const Vector& center, const Vector& radius, int points, Fn&& fn) {
  const Eigen::Index d = center.size();
  if (std::pow(static_cast<double>(points), static_cast<double>(d)) > kMaxGridPoints)
    throw std::invalid_argument("probe grid too large: " + std::to_string(points) + "^" +
                                std::to_string(d) + " points");
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  Vector x(d);
  while (true) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const double frac = points == 1 ? 0.5 : static_cast<double>(idx[i]) / (points - 1);
      x[i] = center[i] - radius[i] + 2.0 * radius[i] * frac;
    }
    fn(x);
    Eigen::Index i = 0;
    while (i < d && ++idx[i] == points) idx[i++] = 0;
    if (i == d) break;
  }
}

void fold_eigenvalues(ConvexityProbe& probe, const Matrix& h, const Vector& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (h + h.transpose()), Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (probe.grid.empty() || lo < probe.min_eig) {
    probe.min_eig = lo;
    probe.argmin_point = x;
  }
  if (probe.grid.empty() || hi > probe.max_eig) probe.max_eig = hi;
  probe.grid.push_back(x);
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

ConvexityProbe hessian_probe(const TargetModel& model, const Vector& center, double radius,
                             int grid_points, bool force_finite_difference) {
  if (center.size() != model.dim()) throw std::invalid_argument("probe center has the wrong dimension");
  if (grid_points < 1) throw std::invalid_argument("probe needs at least one grid point");
  if (!(radius >= 0.0)) throw std::invalid_argument("probe radius must be nonnegative");
  ConvexityProbe probe;
  const bool analytic = !force_finite_difference && model.hessian_log_density(center).has_value();
  probe.h = analytic ? 0.0 : probe_fd_step(0.0);
  const double n = static_cast<double>(model.sample_size());
  for_each_grid_point(center, Vector::Constant(center.size(), radius), grid_points,
                      [&](const Vector& x) {
                        const Matrix h = analytic ? *model.hessian_log_density(x)
                                                  : finite_difference_hessian(model, x, probe_fd_step);
                        if (!h.allFinite()) throw EvaluationError("non-finite Hessian in probe", x);
                        fold_eigenvalues(probe, -h / n, x);
                      });
  return probe;
}

bool CaptureCriterion::contains(const Vector& params) const {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int j = indices[i];
    if (j < 0 || j >= params.size()) return false;
    const auto ii = static_cast<Eigen::Index>(i);
    if (!(std::abs(params[j] - center[ii]) <= tolerance[ii])) return false;
  }
  return true;
}

double CaptureCriterion::distance(const Vector& params) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int j = indices[i];
    if (j < 0 || j >= params.size()) return std::numeric_limits<double>::infinity();
    const double diff = params[j] - center[static_cast<Eigen::Index>(i)];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

Vector summary_moments(const RunTrace& trace) {
  if (!trace.summary) throw std::invalid_argument("trace has no summary");
  const TraceSummary& s = *trace.summary;
  const Eigen::Index d = trace.dim;
  const std::string& layout = s.param_layout.empty() ? trace.param_layout : s.param_layout;
  if (layout == "theta") {
    if (s.params.size() != d) throw std::invalid_argument("summary size disagrees with layout");
    return s.params;
  }
  if (layout != "mu_L" && layout != "theta_sigma")
    throw std::invalid_argument("unknown parameter layout '" + layout + "'");
  if (s.params.size() != d + d * d) throw std::invalid_argument("summary size disagrees with layout");
  const Matrix m = s.params.tail(d * d).reshaped(d, d);
  Vector out(2 * d);
  out.head(d) = s.params.head(d);
  if (layout == "mu_L")
    out.tail(d) = ((m * m.transpose()).diagonal() / static_cast<double>(trace.sample_size)).cwiseSqrt();
  else
    out.tail(d) = m.diagonal().cwiseSqrt();
  return out;
}

CaptureReport capture_rate(const std::vector<RunTrace>& traces, const CaptureCriterion& criterion) {
  if (criterion.center.size() != static_cast<Eigen::Index>(criterion.indices.size()) ||
      criterion.tolerance.size() != criterion.center.size())
    throw std::invalid_argument("capture criterion shapes disagree");
  CaptureReport report;
  report.criterion = criterion.name;
  report.trials = static_cast<long>(traces.size());
  for (const RunTrace& t : traces) {
    if (!t.summary) {
      report.distances.push_back(std::numeric_limits<double>::infinity());
      report.hits.push_back(false);
      continue;
    }
    const Vector moments = summary_moments(t);
    const bool hit = criterion.contains(moments);
    report.distances.push_back(criterion.distance(moments));
    report.hits.push_back(hit);
    if (hit) ++report.captured;
  }
  return report;
}

TrendReport consistency_trend(const std::map<long, std::vector<Vector>>& estimates,
                              const Vector& theta0, double (*alpha_of_n)(long)) {
  if (!alpha_of_n) alpha_of_n = default_alpha;
  TrendReport report;
  for (const auto& [n, thetas] : estimates) {
    std::vector<double> errors;
    errors.reserve(thetas.size());
    for (const Vector& t : thetas) {
      if (t.size() != theta0.size()) throw std::invalid_argument("estimate has the wrong dimension");
      errors.push_back((t - theta0).norm());
    }
    report.rows.push_back({n, alpha_of_n(n), median(std::move(errors))});
  }
  report.non_increasing = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (report.rows[i].median_error > report.rows[i - 1].median_error) report.non_increasing = false;

  report.slope_vs_alpha = std::numeric_limits<double>::quiet_NaN();
  if (report.rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(report.rows.size());
    for (const TrendRow& r : report.rows) {
      const double x = std::log(r.alpha);
      const double y = std::log(r.median_error);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double denom = m * sxx - sx * sx;
    if (denom > 0) report.slope_vs_alpha = (m * sxy - sx * sy) / denom;
  }
  return report;
}

void gauss_legendre(int nodes, std::vector<double>& x, std::vector<double>& w) {
  if (nodes < 1) throw std::invalid_argument("Gauss-Legendre needs at least one node");
  // Golub-Welsch: eigen-decomposition of the Jacobi matrix of the Legendre recurrence.
  Matrix jacobi = Matrix::Zero(nodes, nodes);
  for (int i = 1; i < nodes; ++i)
    jacobi(i, i - 1) = jacobi(i - 1, i) = i / std::sqrt(4.0 * i * i - 1.0);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
  x.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + nodes);
  w.resize(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    const double v0 = eig.eigenvectors()(0, i);
    w[static_cast<std::size_t>(i)] = 2.0 * v0 * v0;
  }
}

double vi_objective_1d(const TargetModel& model, double mu, double L, int panels) {
  if (model.dim() != 1) throw std::invalid_argument("vi_objective_1d needs a 1-D model");
  if (!(L > 0.0)) throw std::invalid_argument("vi_objective_1d needs L > 0");
  if (panels < 1) throw std::invalid_argument("vi_objective_1d needs at least one panel");
  // Gauss-Hermite converges slowly here: -log pi switches curvature between mixture
  // components, so a composite rule on z in [-10, 10] is far more accurate per node.
  constexpr double kZMax = 10.0;
  std::vector<double> x, w;
  gauss_legendre(5, x, w);
  const double n = static_cast<double>(model.sample_size());
  const double scale = L / std::sqrt(n);
  const double half = kZMax / panels;
  double expectation = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = -kZMax + (2 * p + 1) * half;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double z = mid + half * x[i];
      const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
      expectation += half * w[i] * phi * objective(model, Vector::Constant(1, mu + scale * z));
    }
  }
  return -std::log(L) / n + expectation;
}

ConvexityProbe vi_objective_probe_1d(const TargetModel& model, double mu_center, double mu_radius,
                                     double l_center, double l_radius, int grid_points, int panels) {
  if (grid_points < 1) throw std::invalid_argument("probe needs at least one grid point");
  if (!(l_center - l_radius > 0.0))
    throw std::invalid_argument("L range of the probe must stay positive");
  ConvexityProbe probe;
  probe.h = 1e-3;
  auto f = [&](double m, double l) { return vi_objective_1d(model, m, l, panels); };
  Vector center(2), radius(2);
  center << mu_center, l_center;
  radius << mu_radius, l_radius;
  for_each_grid_point(center, radius, grid_points, [&](const Vector& p) {
    const double hm = probe.h * (1.0 + std::abs(p[0]));
    const double hl = std::min(probe.h * (1.0 + std::abs(p[1])), 0.5 * p[1]);
    const double f0 = f(p[0], p[1]);
    Matrix h(2, 2);
    h(0, 0) = (f(p[0] + hm, p[1]) - 2 * f0 + f(p[0] - hm, p[1])) / (hm * hm);
    h(1, 1) = (f(p[0], p[1] + hl) - 2 * f0 + f(p[0], p[1] - hl)) / (hl * hl);
    h(0, 1) = h(1, 0) = (f(p[0] + hm, p[1] + hl) - f(p[0] + hm, p[1] - hl) -
                         f(p[0] - hm, p[1] + hl) + f(p[0] - hm, p[1] - hl)) /
                        (4 * hm * hl);
    fold_eigenvalues(probe, h, p);
  });
  return probe;
}

}  // namespace cvi
