#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ccpd/denoise.hpp"
#include "ccpd/stl.hpp"
#include "ccpd/types.hpp"

namespace ccpd {

/// Per-step peak statistics: count, sum of absolute heights, and sample
/// standard deviation of absolute heights (n-1 divisor; 0 when n <= 1).
struct StepFeatures {
  size_t n = 0;
  double sum = 0.0;
  double sd = 0.0;
};

StepFeatures step_features(std::span<const double> peak_values);

constexpr int kFeatureDims = 12;

/// K steps of 12 features each, ordered (n_w0..n_w3, S_w0..S_w3, SD_w0..SD_w3)
/// with windows in the residual-set order.
struct FeatureSequence {
  std::vector<std::array<double, kFeatureDims>> steps;
  bool scaled = false;

  int step_count() const { return static_cast<int>(steps.size()); }
};

struct LabeledSequence {
  FeatureSequence sequence;
  Label label = Label::Unlabeled;
  uint32_t id = 0;
};

/// Denoises each residual over the whole cycle, detects peaks once, buckets
/// them into steps_k equal steps (the last step absorbs any remainder), and
/// emits unscaled feature vectors. steps_k must be one of {1, 2, 4, 8}.
/// Pass denoise_enabled = false to feature raw residuals (ablation).
FeatureSequence build_sequence(const ResidualSet& residuals, int steps_k,
                               const DenoiseConfig& config, bool denoise_enabled = true);

/// Max-min ranges per feature dimension, pooled across time steps so a
/// dimension keeps one range regardless of step.
struct Scaler {
  std::array<double, kFeatureDims> min{};
  std::array<double, kFeatureDims> max{};
  bool fitted = false;
};

Scaler fit_scaler(std::span<const LabeledSequence> training);

/// x' = (x - min) / (max - min), clamped to [0, 1]; zero-range dimensions
/// map to 0. Throws if the scaler is unfitted.
void apply_scaler(const Scaler& scaler, FeatureSequence& sequence);

/// Duplicates minority-class records by round(majority/minority) and
/// shuffles deterministically. Throws when only one class is present.
std::vector<LabeledSequence> oversample(std::span<const LabeledSequence> records, uint64_t seed);

}  // namespace ccpd
