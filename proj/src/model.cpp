#include "cvi/model.hpp"

#include "cvi/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cvi {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

Vector standard_normal_vector(Rng& rng, int d) {
  std::normal_distribution<double> normal;
  Vector z(d);
  for (int i = 0; i < d; ++i) z[i] = normal(rng);
  return z;
}

Matrix standard_normal_matrix(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> normal;
  Matrix z(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) z(i, j) = normal(rng);
  return z;
}

std::string format_vector(const Vector& v) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ']';
  return os.str();
}

double objective(const TargetModel& model, const Vector& theta) {
  const double lp = model.log_density(theta);
  if (!std::isfinite(lp))
    throw EvaluationError("non-finite log density at " + format_vector(theta), theta);
  return -lp / static_cast<double>(model.sample_size());
}

Vector objective_gradient(const TargetModel& model, const Vector& theta) {
  Vector g = model.grad_log_density(theta);
  if (!g.allFinite())
    throw EvaluationError("non-finite gradient at " + format_vector(theta), theta);
  g /= -static_cast<double>(model.sample_size());
  return g;
}

double default_fd_step(double x) {
  static const double root = std::cbrt(std::numeric_limits<double>::epsilon());
  return root * std::max(1.0, std::abs(x));
}

Matrix finite_difference_hessian(const TargetModel& model, const Vector& theta,
                                 const StepRule& step) {
  const int d = static_cast<int>(theta.size());
  Matrix h(d, d);
  Vector probe = theta;
  for (int i = 0; i < d; ++i) {
    const double hi = step(theta[i]);
    probe[i] = theta[i] + hi;
    const Vector up = model.grad_log_density(probe);
    probe[i] = theta[i] - hi;
    const Vector down = model.grad_log_density(probe);
    probe[i] = theta[i];
    h.col(i) = (up - down) / (2.0 * hi);
  }
  Matrix sym = 0.5 * (h + h.transpose());
  if (!sym.allFinite())
    throw EvaluationError("non-finite finite-difference Hessian at " + format_vector(theta), theta);
  return sym;
}

Matrix hessian_log_density(const TargetModel& model, const Vector& theta) {
  if (auto h = model.hessian_log_density(theta)) {
    if (!h->allFinite())
      throw EvaluationError("non-finite Hessian at " + format_vector(theta), theta);
    return *h;
  }
  return finite_difference_hessian(model, theta);
}

Matrix objective_hessian(const TargetModel& model, const Vector& theta) {
  return hessian_log_density(model, theta) / -static_cast<double>(model.sample_size());
}

}  // namespace cvi
