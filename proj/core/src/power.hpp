#pragma once

#include <cmath>

namespace chemostokes::detail {

// x^e with the common exponents done without pow(); x >= 0.
inline double power(double x, double e) {
  if (e == 2.0) return x * x;
  if (e == 1.0) return x;
  if (e == 0.5) return std::sqrt(x);
  if (e == 1.5) return x * std::sqrt(x);
  if (e == 3.0) return x * x * x;
  if (e == 0.0) return 1.0;
  return std::pow(x, e);
}

}  // namespace chemostokes::detail
