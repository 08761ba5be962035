#pragma once

namespace dickedim {

/// log(n!) for n >= 0, via lgamma.
double log_factorial(int n);

/// log of the binomial coefficient C(n, k); -inf outside 0 <= k <= n.
double log_binomial(int n, int k);

}  // namespace dickedim
