#include "cvi/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace cvi {

double StepSchedule::operator()(long k) const {
  const double kk = static_cast<double>(k);
  switch (form) {
    case Form::shifted_power:
      return scale / std::pow(1.0 + kk, exponent);
    case Form::offset_power:
      return scale / (1.0 + std::pow(kk, exponent));
  }
  return scale;
}

void StepSchedule::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::invalid_argument("step schedule scale must be positive");
  if (!std::isfinite(exponent) || exponent < 0.0)
    throw std::invalid_argument("step schedule exponent must be finite and nonnegative");
  if (!allow_any_exponent && !(exponent > 0.5 && exponent <= 1.0))
    throw std::invalid_argument("step schedule exponent must lie in (0.5, 1]");
}

StepSchedule StepSchedule::constant(double rate) {
  return StepSchedule{rate, 0.0, Form::shifted_power, true};
}

bool operator==(const StepSchedule& a, const StepSchedule& b) {
  return a.scale == b.scale && a.exponent == b.exponent && a.form == b.form &&
         a.allow_any_exponent == b.allow_any_exponent;
}

}  // namespace cvi
