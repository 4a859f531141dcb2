#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ccpd {

struct DenoiseConfig {
  double trim_fraction = 0.05;  // share of largest-|value| samples zeroed
  bool elbow_enabled = true;    // background-noise floor from the sorted curve
};

/// Output series plus the thresholds it was produced with, so the gate can be
/// re-applied (idempotently) or inspected.
struct DenoiseResult {
  std::vector<double> series;
  double transient_cutoff = 0.0;  // samples with |v| >  cutoff are zeroed; +inf when trimming is off
  double noise_floor = 0.0;       // samples with |v| <  floor  are zeroed; 0 when no elbow found
  size_t trimmed = 0;
  size_t floored = 0;
};

/// Two-stage noise gate: (1) zero the ceil(trim_fraction * N) samples of
/// largest magnitude (transients), then (2) locate the background-noise floor
/// on the descending sorted-magnitude curve of the remaining samples and zero
/// everything strictly below it. Length and time alignment are preserved.
DenoiseResult denoise(std::span<const double> residual, const DenoiseConfig& config);

/// Re-applies recorded thresholds. apply_noise_gate(denoise(x).series, ...)
/// with the recorded thresholds is the identity.
std::vector<double> apply_noise_gate(std::span<const double> series, double transient_cutoff,
                                     double noise_floor);

/// Index of the point of a descending curve with maximum perpendicular
/// distance to the chord of its axis-normalized plot (both axes mapped to
/// [0,1], chord from first to last point). Ties resolve to the smallest
/// index. This lands on the first point of the flat region; the noise floor
/// used by denoise() is the value one position earlier (the last point of
/// the steep segment), so the whole flat tail is zeroed.
size_t elbow_index(std::span<const double> sorted_descending);

}  // namespace ccpd
