#include "ccpd/peaks.hpp"

#include <cmath>

namespace ccpd {

std::vector<Peak> detect_peaks(std::span<const double> series) {
  std::vector<Peak> peaks;
  const size_t n = series.size();
  size_t i = 0;
  while (i < n) {
    const double mag = std::abs(series[i]);
    if (series[i] == 0.0) {
      ++i;
      continue;
    }
    const bool rises = i == 0 || std::abs(series[i - 1]) < mag;
    // Run of equal |value|: the plateau. A peak must fall after it.
    size_t j = i + 1;
    while (j < n && std::abs(series[j]) == mag) ++j;
    const bool falls = j == n || std::abs(series[j]) < mag;
    if (rises && falls) peaks.push_back({series[i], i});
    i = j;  // resume after the plateau
  }
  return peaks;
}

}  // namespace ccpd
