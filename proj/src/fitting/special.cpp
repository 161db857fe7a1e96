#include "photodyn/fitting/special.hpp"

#include <cmath>
#include <numbers>

namespace photodyn::fit {

double erfcx(double x) {
  if (x < 0.0) {
    // erfc(-y) = 2 - erfc(y)
    return 2.0 * std::exp(x * x) - erfcx(-x);
  }
  if (x < 12.0) return std::exp(x * x) * std::erfc(x);
  // Continued fraction erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
  // evaluated bottom-up. For x >= 12 forty levels are far past double precision.
  double tail = x;
  for (int k = 40; k >= 1; --k) tail = x + 0.5 * k / tail;
  return 1.0 / (std::sqrt(std::numbers::pi) * tail);
}

}  // namespace photodyn::fit
