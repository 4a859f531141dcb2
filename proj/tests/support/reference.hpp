#pragma once

// Independent reference implementations used as test oracles. These stay
// deliberately naive and separate from the library code paths they check.

#include <cmath>
#include <span>
#include <vector>

namespace ccpd::testing {

// Per-point locally weighted least squares, solved through the raw normal
// equations with Cramer's rule (the library centers the abscissa instead).
// Neighborhood and kernel conventions match the contract: `window` nearest
// indices, tricube weights with h = distance to the farthest neighbor.
inline std::vector<double> loess_reference(std::span<const double> y, int window, int degree,
                                           std::span<const double> robustness = {}) {
  const long n = static_cast<long>(y.size());
  const long w = std::min<long>(window, n);
  std::vector<double> out(n);
  for (long t = 0; t < n; ++t) {
    long lo = t - (w - 1) / 2;
    if (lo < 0) lo = 0;
    if (lo > n - w) lo = n - w;
    const long hi = lo + w - 1;
    const double h = std::max<double>(t - lo, hi - t);

    double sw = 0, swx = 0, swxx = 0, swy = 0, swxy = 0;
    for (long j = lo; j <= hi; ++j) {
      double d = h > 0 ? std::abs(static_cast<double>(j - t)) / h : 0.0;
      double wt = d < 1.0 ? std::pow(1.0 - d * d * d, 3.0) : 0.0;
      if (!robustness.empty()) wt *= robustness[j];
      sw += wt;
      swx += wt * j;
      swxx += wt * static_cast<double>(j) * j;
      swy += wt * y[j];
      swxy += wt * j * y[j];
    }
    if (sw <= 0) {
      double s = 0;
      for (long j = lo; j <= hi; ++j) s += y[j];
      out[t] = s / static_cast<double>(w);
      continue;
    }
    if (degree == 0) {
      out[t] = swy / sw;
      continue;
    }
    const double det = sw * swxx - swx * swx;
    if (std::abs(det) <= 1e-9 * sw * sw * std::max(1.0, h * h)) {
      out[t] = swy / sw;
    } else {
      const double b0 = (swy * swxx - swxy * swx) / det;
      const double b1 = (sw * swxy - swx * swy) / det;
      out[t] = b0 + b1 * t;
    }
  }
  return out;
}

}  // namespace ccpd::testing
