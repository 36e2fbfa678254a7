#pragma once

namespace cvi {

/// Deterministic learning-rate sequence, indexed from k = 0.
struct StepSchedule {
  enum class Form {
    shifted_power,  // C / (1 + k)^rho
    offset_power,   // C / (1 + k^rho)
  };

  double scale = 1.0;
  double exponent = 1.0;
  Form form = Form::shifted_power;
  // Exponents outside (0.5, 1] are only allowed for baselines and constant rates.
  bool allow_any_exponent = false;

  double operator()(long k) const;

  /// Throws std::invalid_argument when scale <= 0 or the exponent is out of range.
  void validate() const;

  static StepSchedule constant(double rate);
};

bool operator==(const StepSchedule& a, const StepSchedule& b);

}  // namespace cvi
