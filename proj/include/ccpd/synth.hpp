#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ccpd/types.hpp"

namespace ccpd {

/// A window of the cycle carrying discharge-like impulses. Pulses are
/// single-sample spikes at distinct random positions inside
/// [start_fraction, end_fraction) with random sign and uniform magnitude in
/// [amplitude_lo, amplitude_hi].
struct BurstSpec {
  double start_fraction = 0.2;
  double end_fraction = 0.45;
  int pulse_count = 60;
  double amplitude_lo = 60.0;
  double amplitude_hi = 220.0;
};

struct TransientSpike {
  double position_fraction = 0.0;  // in [0, 1)
  double amplitude = 0.0;
};

struct SynthSpec {
  size_t sample_count = 8000;
  double fundamental_amplitude = 1000.0;
  std::vector<std::pair<int, double>> harmonic_amplitudes;  // (order >= 2, amplitude)
  double background_noise_sigma = 0.0;
  std::vector<BurstSpec> pd_bursts;
  std::vector<TransientSpike> transient_spikes;
  uint64_t seed = 0;
};

/// Per-sample additive components, recorded before rounding and clamping.
struct GroundTruth {
  std::vector<double> clean;   // fundamental + harmonics
  std::vector<double> noise;   // gaussian background
  std::vector<double> pulses;  // burst impulses (nonzero only for PD records)
  std::vector<double> spikes;  // transient spikes
  size_t clipped_samples = 0;  // samples clamped to the i16 range
};

struct SynthResult {
  Signal signal;
  GroundTruth truth;
};

/// Deterministic given spec.seed. signal = round(clean + noise + pulses +
/// spikes) clamped to the i16 range.
SynthResult generate_signal(const SynthSpec& spec);

/// PD records carry the base spec's bursts (or one default burst when the
/// base has none); non-PD records carry none. Record i uses seed ^ id so
/// records are independent and order-free. PD records come first,
/// ids 0..n_pd+n_non_pd-1.
Dataset generate_dataset(size_t n_pd, size_t n_non_pd, const SynthSpec& base, uint64_t seed);

}  // namespace ccpd
