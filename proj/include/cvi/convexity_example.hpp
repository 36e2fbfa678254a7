#pragma once

#include "cvi/model.hpp"

#include <cstdint>
#include <vector>

namespace cvi {

// f_n(y) = y^2 + mean(X) cos(5y) with X_i ~ N(0, 1), i.e. log pi_n = -n f_n.
// f_n'' = 2 - 25 mean(X) cos(5y), so f_n is nonconvex for small n and tends to
// a 2-strongly convex function as the sample mean vanishes.
class ConvexityExampleModel final : public TargetModel {
 public:
  explicit ConvexityExampleModel(std::vector<double> data);

  std::string name() const override { return "convexity-example"; }
  int dim() const override { return 1; }
  long sample_size() const override { return static_cast<long>(data_.size()); }

  double log_density(const Vector& theta) const override;
  Vector grad_log_density(const Vector& theta) const override;
  std::optional<Matrix> hessian_log_density(const Vector& theta) const override;

  double data_mean() const { return mean_; }

 private:
  std::vector<double> data_;
  double mean_;
};

ConvexityExampleModel make_convexity_example(long n, std::uint64_t seed);

}  // namespace cvi
