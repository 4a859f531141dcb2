#include "ccpd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "ccpd/rng.hpp"

namespace ccpd {

namespace {

void validate_spec(const SynthSpec& spec) {
  if (spec.sample_count < kMinSampleCount)
    throw std::invalid_argument("sample_count must be at least " + std::to_string(kMinSampleCount));
  if (!std::isfinite(spec.fundamental_amplitude))
    throw std::invalid_argument("fundamental_amplitude must be finite");
  for (const auto& [order, amp] : spec.harmonic_amplitudes) {
    if (order < 2) throw std::invalid_argument("harmonic order must be >= 2");
    if (!std::isfinite(amp)) throw std::invalid_argument("harmonic amplitude must be finite");
  }
  if (!(spec.background_noise_sigma >= 0.0))
    throw std::invalid_argument("background_noise_sigma must be >= 0");
  for (const auto& b : spec.pd_bursts) {
    if (!(b.start_fraction >= 0.0 && b.end_fraction < 1.0 && b.start_fraction < b.end_fraction))
      throw std::invalid_argument("burst window must satisfy 0 <= start < end < 1");
    if (b.pulse_count <= 0) throw std::invalid_argument("burst pulse_count must be positive");
    if (!(b.amplitude_lo > 0.0 && b.amplitude_lo <= b.amplitude_hi))
      throw std::invalid_argument("burst amplitude range must satisfy 0 < lo <= hi");
    const auto n = static_cast<double>(spec.sample_count);
    const auto width = static_cast<size_t>(b.end_fraction * n) - static_cast<size_t>(b.start_fraction * n);
    if (static_cast<size_t>(b.pulse_count) > width)
      throw std::invalid_argument("burst pulse_count exceeds the window width in samples");
  }
  for (const auto& s : spec.transient_spikes) {
    if (!(s.position_fraction >= 0.0 && s.position_fraction < 1.0))
      throw std::invalid_argument("spike position_fraction must be in [0, 1)");
    if (!std::isfinite(s.amplitude)) throw std::invalid_argument("spike amplitude must be finite");
  }
}

}  // namespace

SynthResult generate_signal(const SynthSpec& spec) {
  validate_spec(spec);
  const size_t n = spec.sample_count;
  const double w0 = 2.0 * std::numbers::pi / static_cast<double>(n);

  SynthResult out;
  auto& truth = out.truth;
  truth.clean.resize(n);
  truth.noise.assign(n, 0.0);
  truth.pulses.assign(n, 0.0);
  truth.spikes.assign(n, 0.0);

  for (size_t t = 0; t < n; ++t) {
    double v = spec.fundamental_amplitude * std::sin(w0 * static_cast<double>(t));
    for (const auto& [order, amp] : spec.harmonic_amplitudes)
      v += amp * std::sin(w0 * order * static_cast<double>(t));
    truth.clean[t] = v;
  }

  // Independent sub-streams so adding a burst never shifts the noise draw.
  SplitMix64 streams(spec.seed);
  const uint64_t noise_seed = streams.next();
  const uint64_t pulse_seed = streams.next();

  if (spec.background_noise_sigma > 0.0) {
    Rng rng(noise_seed);
    for (size_t t = 0; t < n; ++t) truth.noise[t] = spec.background_noise_sigma * rng.gaussian();
  }

  {
    Rng rng(pulse_seed);
    for (const auto& burst : spec.pd_bursts) {
      const auto lo = static_cast<uint64_t>(burst.start_fraction * static_cast<double>(n));
      const auto hi = static_cast<uint64_t>(burst.end_fraction * static_cast<double>(n));
      std::unordered_set<uint64_t> used;
      for (int p = 0; p < burst.pulse_count; ++p) {
        uint64_t pos;
        do {
          pos = lo + rng.next_below(hi - lo);
        } while (!used.insert(pos).second);
        const double amp = rng.uniform(burst.amplitude_lo, burst.amplitude_hi);
        const double sign = (rng.next_u64() & 1) ? 1.0 : -1.0;
        truth.pulses[pos] += sign * amp;
      }
    }
  }

  for (const auto& spike : spec.transient_spikes) {
    const auto pos = static_cast<size_t>(spike.position_fraction * static_cast<double>(n));
    truth.spikes[pos] += spike.amplitude;
  }

  out.signal.samples.resize(n);
  for (size_t t = 0; t < n; ++t) {
    const double v = truth.clean[t] + truth.noise[t] + truth.pulses[t] + truth.spikes[t];
    long long q = std::llround(v);
    if (q < INT16_MIN || q > INT16_MAX) {
      ++truth.clipped_samples;
      q = std::clamp<long long>(q, INT16_MIN, INT16_MAX);
    }
    out.signal.samples[t] = static_cast<int16_t>(q);
  }
  return out;
}

Dataset generate_dataset(size_t n_pd, size_t n_non_pd, const SynthSpec& base, uint64_t seed) {
  Dataset dataset;
  dataset.records.reserve(n_pd + n_non_pd);
  for (size_t i = 0; i < n_pd + n_non_pd; ++i) {
    const bool pd = i < n_pd;
    SynthSpec spec = base;
    spec.seed = seed ^ static_cast<uint64_t>(i);
    if (pd) {
      if (spec.pd_bursts.empty()) spec.pd_bursts.push_back(BurstSpec{});
    } else {
      spec.pd_bursts.clear();
    }
    LabeledSignal rec;
    rec.id = static_cast<uint32_t>(i);
    rec.label = pd ? Label::Pd : Label::NonPd;
    rec.signal = generate_signal(spec).signal;
    dataset.records.push_back(std::move(rec));
  }
  validate_dataset(dataset);
  return dataset;
}

}  // namespace ccpd
