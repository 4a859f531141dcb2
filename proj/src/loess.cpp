#include "ccpd/loess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ccpd {

namespace {

inline double tricube(double d) {
  if (d >= 1.0) return 0.0;
  const double c = 1.0 - d * d * d;
  return c * c * c;
}

struct Neighborhood {
  long lo;
  long hi;
  double h;
};

Neighborhood neighborhood(long n, double site, int window) {
  const int w = std::min<long>(window, n);
  long lo = std::lround(site) - (w - 1) / 2;
  lo = std::clamp<long>(lo, 0, n - w);
  const long hi = lo + w - 1;
  const double h = std::max(std::abs(site - static_cast<double>(lo)),
                            std::abs(static_cast<double>(hi) - site));
  return {lo, hi, h};
}

// Weighted least squares over [lo, hi] with the given pointwise weights.
// degree 1 fits value + slope about the weighted mean abscissa and evaluates
// (or extrapolates) at the site; a spread-free neighborhood degrades to the
// weighted mean.
double weighted_fit(std::span<const double> y, const Neighborhood& nb, double site, int degree,
                    std::span<const double> w) {
  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (long j = nb.lo; j <= nb.hi; ++j) {
    const double wj = w[j - nb.lo];
    sw += wj;
    swx += wj * static_cast<double>(j);
    swy += wj * y[j];
  }
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  if (degree == 0) return ybar;

  double sxx = 0.0, sxy = 0.0;
  for (long j = nb.lo; j <= nb.hi; ++j) {
    const double wj = w[j - nb.lo];
    const double dx = static_cast<double>(j) - xbar;
    sxx += wj * dx * dx;
    sxy += wj * dx * (y[j] - ybar);
  }
  if (sxx <= 1e-12 * sw * std::max(1.0, nb.h * nb.h)) return ybar;
  return ybar + (sxy / sxx) * (site - xbar);
}

}  // namespace

double loess_fit_at(std::span<const double> series, double site, int window, int degree,
                    std::span<const double> robustness) {
  const long n = static_cast<long>(series.size());
  if (n == 0) throw std::invalid_argument("loess: empty series");
  if (window < 1) throw std::invalid_argument("loess: window must be positive");
  if (window > n)
    throw std::invalid_argument("loess: window " + std::to_string(window) +
                                " exceeds series length " + std::to_string(n));
  if (degree != 0 && degree != 1) throw std::invalid_argument("loess: degree must be 0 or 1");
  if (!robustness.empty() && robustness.size() != series.size())
    throw std::invalid_argument("loess: robustness weights must match the series length");

  const Neighborhood nb = neighborhood(n, site, window);
  if (nb.h <= 0.0) return series[nb.lo];  // single-point neighborhood

  const size_t count = static_cast<size_t>(nb.hi - nb.lo + 1);
  double wbuf[256];
  std::vector<double> wheap;
  double* w = count <= 256 ? wbuf : (wheap.resize(count), wheap.data());

  double total = 0.0;
  for (long j = nb.lo; j <= nb.hi; ++j) {
    double wj = tricube(std::abs(static_cast<double>(j) - site) / nb.h);
    if (!robustness.empty()) wj *= robustness[j];
    w[j - nb.lo] = wj;
    total += wj;
  }
  if (total <= 0.0) {
    // Robustness zeroed the whole neighborhood: fall back to plain tricube.
    total = 0.0;
    for (long j = nb.lo; j <= nb.hi; ++j) {
      const double wj = tricube(std::abs(static_cast<double>(j) - site) / nb.h);
      w[j - nb.lo] = wj;
      total += wj;
    }
  }
  if (total <= 0.0) {
    // Every tricube weight vanished (extrapolation with a tiny window):
    // plain neighborhood mean.
    double sum = 0.0;
    for (long j = nb.lo; j <= nb.hi; ++j) sum += series[j];
    return sum / static_cast<double>(count);
  }
  return weighted_fit(series, nb, site, degree, {w, count});
}

std::vector<double> loess_smooth(std::span<const double> series, int window, int degree,
                                 std::span<const double> robustness, int eval_stride) {
  const long n = static_cast<long>(series.size());
  if (n == 0) throw std::invalid_argument("loess: empty series");
  if (eval_stride < 1) throw std::invalid_argument("loess: eval_stride must be positive");
  if (!robustness.empty()) {
    for (const double r : robustness)
      if (!(r >= 0.0 && r <= 1.0))
        throw std::invalid_argument("loess: robustness weights must lie in [0, 1]");
  }

  std::vector<long> sites;
  sites.reserve(static_cast<size_t>(n / eval_stride) + 2);
  for (long t = 0; t < n; t += eval_stride) sites.push_back(t);
  if (sites.back() != n - 1) sites.push_back(n - 1);

  std::vector<double> fitted(sites.size());
#pragma omp parallel for schedule(static)
  for (long s = 0; s < static_cast<long>(sites.size()); ++s)
    fitted[s] = loess_fit_at(series, static_cast<double>(sites[s]), window, degree, robustness);

  std::vector<double> out(n);
  for (size_t s = 0; s + 1 < sites.size(); ++s) {
    const long a = sites[s], b = sites[s + 1];
    out[a] = fitted[s];
    const double step = (fitted[s + 1] - fitted[s]) / static_cast<double>(b - a);
    for (long t = a + 1; t < b; ++t) out[t] = fitted[s] + step * static_cast<double>(t - a);
  }
  out[n - 1] = fitted.back();
  return out;
}

}  // namespace ccpd
