#include "ccpd/rng.hpp"

#include <cmath>
#include <numbers>

namespace ccpd {

double Rng::gaussian() {
  // u1 in (0, 1] keeps the log finite.
  const double u1 = 1.0 - next_double();
  const double u2 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace ccpd
