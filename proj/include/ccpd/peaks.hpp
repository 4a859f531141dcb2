#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ccpd {

struct Peak {
  double value = 0.0;   // original signed magnitude
  size_t position = 0;
};

/// A peak is a nonzero sample whose |value| is strictly greater than both
/// neighbors' |values|. The series boundary counts as -infinity; a plateau of
/// equal |values| yields its leftmost sample.
std::vector<Peak> detect_peaks(std::span<const double> series);

}  // namespace ccpd
