#include "cvi/convexity_example.hpp"

#include <cmath>
#include <stdexcept>

namespace cvi {

ConvexityExampleModel::ConvexityExampleModel(std::vector<double> data) : data_(std::move(data)) {
  if (data_.empty()) throw std::invalid_argument("convexity example needs n >= 1 observations");
  double sum = 0.0;
  for (double x : data_) sum += x;
  mean_ = sum / static_cast<double>(data_.size());
}

double ConvexityExampleModel::log_density(const Vector& theta) const {
  const double y = theta[0];
  return -static_cast<double>(data_.size()) * (y * y + mean_ * std::cos(5.0 * y));
}

Vector ConvexityExampleModel::grad_log_density(const Vector& theta) const {
  const double y = theta[0];
  return Vector::Constant(1, -static_cast<double>(data_.size()) *
                                 (2.0 * y - 5.0 * mean_ * std::sin(5.0 * y)));
}

std::optional<Matrix> ConvexityExampleModel::hessian_log_density(const Vector& theta) const {
  const double y = theta[0];
  return Matrix::Constant(1, 1, -static_cast<double>(data_.size()) *
                                    (2.0 - 25.0 * mean_ * std::cos(5.0 * y)));
}

ConvexityExampleModel make_convexity_example(long n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("make_convexity_example: n must be >= 1");
  Rng rng = make_rng(seed, 0xE1);
  std::normal_distribution<double> draw;
  std::vector<double> data(static_cast<std::size_t>(n));
  for (double& x : data) x = draw(rng);
  return ConvexityExampleModel(std::move(data));
}

}  // namespace cvi
