#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace infobound {

// Error taxonomy. Each maps to one failure class of the library contract;
// the CLI turns all of them into exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Missing or inadmissible bound parameter.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Mismatched vector/table dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A user-supplied evaluator returned NaN/inf inside its declared domain.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration would exceed the configured budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Gibbs normalizer is zero (all prior mass on infinite energies).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent experiment or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// +inf is the sentinel for absolute-continuity failures. It propagates
// through the bound arithmetic and renders a bound vacuous.
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kLn2 = std::numbers::ln2;

inline bool is_infinite(double x) { return std::isinf(x) && x > 0; }

inline double nats_to_bits(double nats) { return nats / kLn2; }

/// ln sum_i exp(x_i), with -inf entries ignored. Returns -inf for an all -inf
/// (or empty) input.
inline double log_sum_exp(std::span<const double> xs) {
  double hi = -kInf;
  for (double x : xs) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

/// x ln(x / y) with the conventions 0 ln(0/y) = 0 and x ln(x/0) = +inf.
inline double xlogx_over_y(double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return kInf;
  return x * std::log(x / y);
}

}  // namespace infobound
