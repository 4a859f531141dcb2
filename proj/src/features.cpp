#include "ccpd/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ccpd/peaks.hpp"
#include "ccpd/rng.hpp"

namespace ccpd {

StepFeatures step_features(std::span<const double> peak_values) {
  StepFeatures out;
  out.n = peak_values.size();
  for (const double r : peak_values) out.sum += std::abs(r);
  if (out.n >= 2) {
    const double mean = out.sum / static_cast<double>(out.n);
    double ss = 0.0;
    for (const double r : peak_values) {
      const double d = std::abs(r) - mean;
      ss += d * d;
    }
    out.sd = std::sqrt(ss / static_cast<double>(out.n - 1));
  }
  return out;
}

FeatureSequence build_sequence(const ResidualSet& residuals, int steps_k,
                               const DenoiseConfig& config, bool denoise_enabled) {
  if (steps_k != 1 && steps_k != 2 && steps_k != 4 && steps_k != 8)
    throw std::invalid_argument("build_sequence: steps must be one of 1, 2, 4, 8");
  const size_t n = residuals.residuals.front().size();
  for (const auto& r : residuals.residuals)
    if (r.size() != n) throw std::invalid_argument("build_sequence: residual lengths differ");
  const size_t k = static_cast<size_t>(steps_k);
  const size_t step_len = n / k;  // the final step absorbs any remainder

  FeatureSequence seq;
  seq.steps.assign(k, {});
  for (size_t w = 0; w < residuals.residuals.size(); ++w) {
    std::vector<double> gated;
    std::span<const double> series = residuals.residuals[w];
    if (denoise_enabled) {
      gated = denoise(series, config).series;
      series = gated;
    }
    const auto peaks = detect_peaks(series);

    std::vector<std::vector<double>> bucketed(k);
    for (const auto& peak : peaks) {
      const size_t step = std::min(k - 1, peak.position / step_len);
      bucketed[step].push_back(peak.value);
    }
    for (size_t s = 0; s < k; ++s) {
      const StepFeatures f = step_features(bucketed[s]);
      seq.steps[s][w] = static_cast<double>(f.n);
      seq.steps[s][4 + w] = f.sum;
      seq.steps[s][8 + w] = f.sd;
    }
  }
  return seq;
}

Scaler fit_scaler(std::span<const LabeledSequence> training) {
  if (training.empty()) throw std::invalid_argument("fit_scaler: no training sequences");
  Scaler scaler;
  scaler.min.fill(std::numeric_limits<double>::infinity());
  scaler.max.fill(-std::numeric_limits<double>::infinity());
  for (const auto& rec : training) {
    for (const auto& step : rec.sequence.steps) {
      for (int d = 0; d < kFeatureDims; ++d) {
        scaler.min[d] = std::min(scaler.min[d], step[d]);
        scaler.max[d] = std::max(scaler.max[d], step[d]);
      }
    }
  }
  scaler.fitted = true;
  return scaler;
}

void apply_scaler(const Scaler& scaler, FeatureSequence& sequence) {
  if (!scaler.fitted) throw std::logic_error("apply_scaler: scaler has not been fitted");
  for (auto& step : sequence.steps) {
    for (int d = 0; d < kFeatureDims; ++d) {
      const double range = scaler.max[d] - scaler.min[d];
      const double x = range > 0.0 ? (step[d] - scaler.min[d]) / range : 0.0;
      step[d] = std::clamp(x, 0.0, 1.0);
    }
  }
  sequence.scaled = true;
}

std::vector<LabeledSequence> oversample(std::span<const LabeledSequence> records, uint64_t seed) {
  size_t pd = 0, non_pd = 0;
  for (const auto& rec : records) {
    if (rec.label == Label::Pd) ++pd;
    else if (rec.label == Label::NonPd) ++non_pd;
    else throw std::invalid_argument("oversample: record " + std::to_string(rec.id) + " is unlabeled");
  }
  if (pd == 0 || non_pd == 0)
    throw std::invalid_argument("oversample: both classes must be present");

  const size_t minority = std::min(pd, non_pd);
  const size_t majority = std::max(pd, non_pd);
  const Label minority_label = pd <= non_pd ? Label::Pd : Label::NonPd;
  const auto factor = static_cast<size_t>(
      std::llround(static_cast<double>(majority) / static_cast<double>(minority)));

  std::vector<LabeledSequence> out(records.begin(), records.end());
  out.reserve(records.size() + minority * (factor - 1));
  for (size_t copy = 1; copy < factor; ++copy)
    for (const auto& rec : records)
      if (rec.label == minority_label) out.push_back(rec);

  Rng rng(seed);
  for (size_t i = out.size(); i > 1; --i)
    std::swap(out[i - 1], out[rng.next_below(i)]);
  return out;
}

}  // namespace ccpd
