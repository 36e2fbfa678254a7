#include "cvi/adam.hpp"

#include <cmath>

namespace cvi {

bool operator==(const AdamSettings& a, const AdamSettings& b) {
  return a.beta1 == b.beta1 && a.beta2 == b.beta2 && a.eps == b.eps;
}

AdamState::AdamState(Eigen::Index size, AdamSettings settings)
    : settings_(settings), m_(Vector::Zero(size)), v_(Vector::Zero(size)) {}

Vector AdamState::step(const Vector& gradient, double gamma) {
  ++t_;
  const double b1 = settings_.beta1;
  const double b2 = settings_.beta2;
  m_ = b1 * m_ + (1.0 - b1) * gradient;
  v_ = b2 * v_ + (1.0 - b2) * gradient.cwiseAbs2();
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const Eigen::ArrayXd m_hat = m_.array() / c1;
  const Eigen::ArrayXd v_hat = v_.array() / c2;
  return (gamma * m_hat / (v_hat.sqrt() + settings_.eps)).matrix();
}

}  // namespace cvi
