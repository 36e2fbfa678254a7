#pragma once

#include "cvi/model.hpp"
#include "cvi/trace.hpp"

#include <map>
#include <string>
#include <vector>

namespace cvi {

struct ConvexityProbe {
  std::vector<Vector> grid;
  double h = 0.0;  // finite-difference base step (0 when analytic Hessians were used)
  double min_eig = 0.0;
  double max_eig = 0.0;
  Vector argmin_point;  // grid point attaining min_eig
};

/// Extreme eigenvalues of grad^2 f_n over a tensor grid of `grid_points` per axis
/// spanning center +/- radius. Analytic Hessians are used when the model has them;
/// otherwise central differences with step 1e-4 (1 + |theta_i|).
ConvexityProbe hessian_probe(const TargetModel& model, const Vector& center, double radius,
                             int grid_points, bool force_finite_difference = false);

double probe_fd_step(double x);

/// Box predicate on selected entries of a trace's final parameters:
/// |p[indices[i]] - center[i]| <= tolerance[i] for all i.
struct CaptureCriterion {
  std::string name;
  std::vector<int> indices;
  Vector center;
  Vector tolerance;

  bool contains(const Vector& params) const;
  double distance(const Vector& params) const;  // Euclidean distance to center on indices
};

/// [mean; marginal sd] of the final approximation in a trace summary: the point itself
/// for "theta", sqrt(diag(L L^T) / n) for "mu_L", sqrt(diag Sigma) for "theta_sigma".
/// Throws std::invalid_argument for traces without a summary or an unknown layout.
Vector summary_moments(const RunTrace& trace);

struct CaptureReport {
  long trials = 0;
  long captured = 0;
  std::string criterion;
  std::vector<double> distances;  // +inf for traces without a summary
  std::vector<bool> hits;
};

/// Applies the criterion to summary_moments of every trace.
CaptureReport capture_rate(const std::vector<RunTrace>& traces, const CaptureCriterion& criterion);

struct TrendRow {
  long n = 0;
  double alpha = 0.0;
  double median_error = 0.0;
};

struct TrendReport {
  std::vector<TrendRow> rows;  // ascending n
  double slope_vs_alpha = 0.0;  // least-squares slope of log median error vs log alpha_n
  bool non_increasing = false;
};

/// Median ||theta_hat - theta0|| per n. `alpha_of_n` defaults to default_alpha.
TrendReport consistency_trend(const std::map<long, std::vector<Vector>>& estimates,
                              const Vector& theta0,
                              double (*alpha_of_n)(long) = nullptr);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int nodes, std::vector<double>& x, std::vector<double>& w);

/// -log(L)/n + F_n(mu, L) for d = 1 by composite 5-point Gauss-Legendre over z in [-10, 10].
double vi_objective_1d(const TargetModel& model, double mu, double L, int panels = 200);

/// Extreme eigenvalues of the (mu, L) Hessian of the 1-D VI objective over a grid,
/// by central differences of the quadrature objective.
ConvexityProbe vi_objective_probe_1d(const TargetModel& model, double mu_center, double mu_radius,
                                     double l_center, double l_radius, int grid_points,
                                     int panels = 200);

}  // namespace cvi
