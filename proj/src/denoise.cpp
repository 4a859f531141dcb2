#include "ccpd/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ccpd {

size_t elbow_index(std::span<const double> sorted_descending) {
  const size_t m = sorted_descending.size();
  if (m < 3) return 0;
  const double first = sorted_descending.front();
  const double last = sorted_descending.back();
  const double range = first - last;
  if (range <= 0.0) return 0;

  // Normalized to the unit square the chord runs from (0,1) to (1,0); the
  // perpendicular distance to it is |x + y - 1| / sqrt(2).
  size_t best = 0;
  double best_dist = -1.0;
  for (size_t i = 0; i < m; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(m - 1);
    const double y = (sorted_descending[i] - last) / range;
    const double dist = std::abs(x + y - 1.0);
    if (dist > best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return best;
}

DenoiseResult denoise(std::span<const double> residual, const DenoiseConfig& config) {
  const size_t n = residual.size();
  if (n == 0) throw std::invalid_argument("denoise: empty series");
  if (!(config.trim_fraction >= 0.0 && config.trim_fraction <= 0.5))
    throw std::invalid_argument("denoise: trim_fraction must lie in [0, 0.5]");

  DenoiseResult out;
  out.series.assign(residual.begin(), residual.end());
  out.transient_cutoff = std::numeric_limits<double>::infinity();

  // Stage 1: zero the ceil(trim_fraction * n) largest-|value| samples.
  const auto trim_count = static_cast<size_t>(std::ceil(config.trim_fraction * static_cast<double>(n)));
  if (trim_count > 0) {
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::partial_sort(order.begin(), order.begin() + trim_count, order.end(),
                      [&](size_t a, size_t b) {
                        const double ma = std::abs(residual[a]), mb = std::abs(residual[b]);
                        return ma != mb ? ma > mb : a < b;
                      });
    for (size_t i = 0; i < trim_count; ++i) out.series[order[i]] = 0.0;
    out.trimmed = trim_count;
    double max_survivor = 0.0;
    for (size_t i = 0; i < n; ++i)
      if (out.series[i] != 0.0) max_survivor = std::max(max_survivor, std::abs(out.series[i]));
    out.transient_cutoff = max_survivor;
  }

  // Stage 2: noise floor from the sorted-magnitude curve of the survivors.
  if (config.elbow_enabled && n > trim_count) {
    std::vector<double> curve;
    curve.reserve(n - trim_count);
    if (trim_count == 0) {
      for (const double v : residual) curve.push_back(std::abs(v));
    } else {
      std::vector<char> trimmed(n, 0);
      for (size_t i = 0; i < n; ++i)
        if (out.series[i] == 0.0 && residual[i] != 0.0) trimmed[i] = 1;
      for (size_t i = 0; i < n; ++i)
        if (!trimmed[i]) curve.push_back(std::abs(residual[i]));
    }
    std::sort(curve.begin(), curve.end(), std::greater<>());
    if (curve.size() >= 3 && curve.front() > curve.back()) {
      const size_t knee = elbow_index(curve);
      // The knee lands on the first flat point; the floor is the last steep
      // value, so the whole tail goes to zero.
      out.noise_floor = curve[knee > 0 ? knee - 1 : 0];
      for (size_t i = 0; i < n; ++i) {
        if (out.series[i] != 0.0 && std::abs(out.series[i]) < out.noise_floor) {
          out.series[i] = 0.0;
          ++out.floored;
        }
      }
    }
  }
  return out;
}

std::vector<double> apply_noise_gate(std::span<const double> series, double transient_cutoff,
                                     double noise_floor) {
  std::vector<double> out(series.begin(), series.end());
  for (double& v : out) {
    const double mag = std::abs(v);
    if (mag > transient_cutoff || mag < noise_floor) v = 0.0;
  }
  return out;
}

}  // namespace ccpd
