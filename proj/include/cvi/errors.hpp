#pragma once

#include "cvi/types.hpp"

#include <stdexcept>
#include <string>

namespace cvi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A model returned a non-finite value, or an estimator could not be formed at theta.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, Vector theta)
      : Error(what), theta_(std::move(theta)) {}
  const Vector& theta() const { return theta_; }

 private:
  Vector theta_;
};

class DegenerateWeightsError : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

class LineSearchError : public Error {
 public:
  LineSearchError(const std::string& what, Vector theta, double grad_norm)
      : Error(what), theta_(std::move(theta)), grad_norm_(grad_norm) {}
  const Vector& theta() const { return theta_; }
  double grad_norm() const { return grad_norm_; }

 private:
  Vector theta_;
  double grad_norm_;
};

// Wraps a failure inside an iterative run with the iteration it happened at.
class OptimizationError : public Error {
 public:
  OptimizationError(const std::string& what, long iteration, Vector snapshot)
      : Error(what), iteration_(iteration), snapshot_(std::move(snapshot)) {}
  long iteration() const { return iteration_; }
  const Vector& snapshot() const { return snapshot_; }

 private:
  long iteration_;
  Vector snapshot_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

std::string format_vector(const Vector& v);

}  // namespace cvi
