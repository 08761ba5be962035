#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dickedim {

// Raised when a numerical routine fails to produce a trustworthy result
// (eigensolver failure, truncation leakage, degenerate estimator). Invalid
// user input is reported through std::invalid_argument / std::domain_error.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Monte Carlo estimate with its one-sigma standard error.
struct Estimate {
  double value = 0.0;
  double error = 0.0;  // standard error

  double relative_error() const { return value != 0.0 ? error / std::abs(value) : INFINITY; }
};

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline const double kSqrtTwoPi = std::sqrt(kTwoPi);

// Version string baked in at configure time (git describe).
const char* version();

}  // namespace dickedim
