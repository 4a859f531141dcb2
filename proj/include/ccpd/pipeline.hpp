#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ccpd/denoise.hpp"
#include "ccpd/eval.hpp"
#include "ccpd/features.hpp"
#include "ccpd/kvfile.hpp"
#include "ccpd/stl.hpp"
#include "ccpd/train.hpp"
#include "ccpd/types.hpp"

namespace ccpd {

/// Everything the end-to-end flow needs, serializable as key = value text.
struct PipelineConfig {
  std::array<int, 4> windows{100, 1000, 10000, 100000};
  bool autoscale_windows = true;  // scale windows with sample count
  int steps_k = 4;
  DenoiseConfig denoise;
  bool denoise_enabled = true;
  bool oversample_enabled = true;
  bool oversample_before_split = false;  // compatibility protocol; leaks duplicates
  ModelKind model = ModelKind::Lstm;
  TrainConfig train;
  double test_fraction = 0.2;
  uint64_t split_seed = 0;
  int stl_inner = 2;
  int stl_outer = 1;

  KvFile to_kv() const;
  static PipelineConfig from_kv(const KvFile& kv);

  /// Feature steps actually used by a model kind: full-cycle models (FNN,
  /// MLR) always consume K = 1.
  int steps_for(ModelKind kind) const;
};

/// A self-contained classifier: model parameters plus the scaler and the
/// preprocessing settings needed to take a raw Signal to a probability.
struct TrainedModel {
  ModelKind kind = ModelKind::Lstm;
  ModelParams params;
  Scaler scaler;
  int steps_k = 4;
  std::array<int, 4> windows{100, 1000, 10000, 100000};
  bool autoscale_windows = true;
  DenoiseConfig denoise;
  bool denoise_enabled = true;
  int stl_inner = 2;
  int stl_outer = 1;
  double threshold = 0.5;
};

std::array<int, 4> effective_windows(const PipelineConfig& config, size_t sample_count);

/// Decomposes every record (parallel across signals) in input order.
std::vector<ResidualSet> decompose_dataset(const Dataset& dataset,
                                           const std::array<int, 4>& windows, int stl_inner,
                                           int stl_outer);

/// ResidualSet -> unscaled labeled sequence per record; `labels` runs
/// parallel to `residuals`, ids come from the residual sets.
std::vector<LabeledSequence> featurize_residuals(std::span<const ResidualSet> residuals,
                                                 std::span<const Label> labels, int steps_k,
                                                 const DenoiseConfig& config,
                                                 bool denoise_enabled);

/// Full training flow on a labeled dataset: split, featurize, scale (fit on
/// the training side only), oversample, fit. Returns the model plus reports
/// on both partitions.
struct PipelineRun {
  TrainedModel model;
  EvalReport train_report;
  EvalReport test_report;
};

PipelineRun train_pipeline(const Dataset& dataset, const PipelineConfig& config);

/// Same flow starting from precomputed residuals (so experiments can reuse
/// the expensive decomposition across cells).
PipelineRun train_pipeline_on_residuals(std::span<const ResidualSet> residuals,
                                        const Dataset& dataset, const PipelineConfig& config);

/// Split, scale, oversample, and fit from already-featurized records (the
/// staged CLI path). Produces the same model as the fused flow given the
/// same features, config, and seed.
PipelineRun fit_from_features(std::span<const LabeledSequence> unscaled,
                              const PipelineConfig& config);

double classify_probability(const TrainedModel& model, const Signal& signal);
std::vector<Prediction> predict_dataset(const TrainedModel& model, const Dataset& dataset);

EvalReport evaluate_model(const TrainedModel& model, const Dataset& dataset);

enum class ExperimentGrid { TimeSteps, Ablation, Classifiers };

ExperimentGrid experiment_grid_from_string(const std::string& name);

/// Runs every cell of the grid with a shared split and seed, returns one
/// report per cell, and (when out_dir is given) writes the figure-data
/// summary CSV (fig11/fig12/fig13.csv) plus per-cell JSON reports.
std::vector<EvalReport> run_experiment(ExperimentGrid grid, const Dataset& dataset,
                                       const PipelineConfig& config,
                                       const std::optional<std::filesystem::path>& out_dir);

/// JSON serialization of a full report (config echo, counts, metrics,
/// per-record predictions).
std::string report_to_json(const EvalReport& report);
void write_report_json(const std::filesystem::path& path, const EvalReport& report);

}  // namespace ccpd
