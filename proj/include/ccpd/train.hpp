#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "ccpd/features.hpp"
#include "ccpd/models.hpp"

namespace ccpd {

enum class Optimizer { Sgd, Adam };

struct TrainConfig {
  double learning_rate = 1e-2;
  int epochs = 200;
  int batch_size = 32;
  Optimizer optimizer = Optimizer::Adam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double grad_clip_norm = 5.0;        // global L2 clip; <= 0 disables
  double validation_fraction = 0.0;   // > 0: return the best-by-validation params
  int hidden_size = 16;
  uint64_t seed = 0;
};

using ModelParams = std::variant<LstmParams, RnnParams, FnnParams, MlrParams>;

struct FitResult {
  ModelKind kind = ModelKind::Lstm;
  ModelParams params;
  std::vector<double> epoch_loss;  // mean training BCE per epoch
};

/// Mini-batch BCE training with deterministic init, shuffling, and batch
/// reduction: identical (records, config, seed) give bitwise-identical
/// parameters regardless of thread count. Records must be scaled (and, for
/// imbalanced data, already oversampled). Throws on non-finite loss.
FitResult fit_model(ModelKind kind, std::span<const LabeledSequence> records,
                    const TrainConfig& config);

double predict_probability(const ModelParams& params, const FeatureSequence& sequence);

}  // namespace ccpd
