#include "dickedim/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dickedim/common.hpp"

namespace dickedim {

#ifndef DICKEDIM_VERSION
#define DICKEDIM_VERSION "unknown"
#endif

const char* version() { return DICKEDIM_VERSION; }

double log_factorial(int n) {
  if (n < 0) throw std::domain_error("log_factorial: negative argument");
  if (n < 2) return 0.0;
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

}  // namespace dickedim
