#include "ccpd/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ccpd {

namespace {

int64_t as_flag(bool v) { return v ? 1 : 0; }

Label predicted_label(double probability, double threshold) {
  return probability >= threshold ? Label::Pd : Label::NonPd;
}

int label_code(Label label) {
  return label == Label::Unlabeled ? -1 : static_cast<int>(label);
}

}  // namespace

int PipelineConfig::steps_for(ModelKind kind) const {
  return (kind == ModelKind::Fnn || kind == ModelKind::Mlr) ? 1 : steps_k;
}

KvFile PipelineConfig::to_kv() const {
  KvFile kv;
  kv.set("windows", std::span<const int>(windows));
  kv.set("autoscale_windows", as_flag(autoscale_windows));
  kv.set("steps", static_cast<int64_t>(steps_k));
  kv.set("trim_fraction", denoise.trim_fraction);
  kv.set("elbow", as_flag(denoise.elbow_enabled));
  kv.set("denoise", as_flag(denoise_enabled));
  kv.set("oversample", as_flag(oversample_enabled));
  kv.set("oversample_before_split", as_flag(oversample_before_split));
  kv.set("model", to_string(model));
  kv.set("hidden", static_cast<int64_t>(train.hidden_size));
  kv.set("learning_rate", train.learning_rate);
  kv.set("epochs", static_cast<int64_t>(train.epochs));
  kv.set("batch_size", static_cast<int64_t>(train.batch_size));
  kv.set("optimizer", train.optimizer == Optimizer::Adam ? "adam" : "sgd");
  kv.set("grad_clip_norm", train.grad_clip_norm);
  kv.set("validation_fraction", train.validation_fraction);
  kv.set("seed", static_cast<int64_t>(train.seed));
  kv.set("split", test_fraction);
  kv.set("stl_inner", static_cast<int64_t>(stl_inner));
  kv.set("stl_outer", static_cast<int64_t>(stl_outer));
  return kv;
}

PipelineConfig PipelineConfig::from_kv(const KvFile& kv) {
  PipelineConfig cfg;
  if (kv.has("windows")) {
    const auto w = kv.get_array("windows");
    if (w.size() != 4) throw std::runtime_error("config: windows must list 4 periods");
    for (size_t i = 0; i < 4; ++i) cfg.windows[i] = static_cast<int>(w[i]);
  }
  if (kv.has("autoscale_windows")) cfg.autoscale_windows = kv.get_int("autoscale_windows") != 0;
  if (kv.has("steps")) cfg.steps_k = static_cast<int>(kv.get_int("steps"));
  if (kv.has("trim_fraction")) cfg.denoise.trim_fraction = kv.get_double("trim_fraction");
  if (kv.has("elbow")) cfg.denoise.elbow_enabled = kv.get_int("elbow") != 0;
  if (kv.has("denoise")) cfg.denoise_enabled = kv.get_int("denoise") != 0;
  if (kv.has("oversample")) cfg.oversample_enabled = kv.get_int("oversample") != 0;
  if (kv.has("oversample_before_split"))
    cfg.oversample_before_split = kv.get_int("oversample_before_split") != 0;
  if (kv.has("model")) cfg.model = model_kind_from_string(kv.get_string("model"));
  if (kv.has("hidden")) cfg.train.hidden_size = static_cast<int>(kv.get_int("hidden"));
  if (kv.has("learning_rate")) cfg.train.learning_rate = kv.get_double("learning_rate");
  if (kv.has("epochs")) cfg.train.epochs = static_cast<int>(kv.get_int("epochs"));
  if (kv.has("batch_size")) cfg.train.batch_size = static_cast<int>(kv.get_int("batch_size"));
  if (kv.has("optimizer")) {
    const auto name = kv.get_string("optimizer");
    if (name == "adam") cfg.train.optimizer = Optimizer::Adam;
    else if (name == "sgd") cfg.train.optimizer = Optimizer::Sgd;
    else throw std::runtime_error("config: unknown optimizer '" + name + "'");
  }
  if (kv.has("grad_clip_norm")) cfg.train.grad_clip_norm = kv.get_double("grad_clip_norm");
  if (kv.has("validation_fraction"))
    cfg.train.validation_fraction = kv.get_double("validation_fraction");
  if (kv.has("seed")) {
    cfg.train.seed = static_cast<uint64_t>(kv.get_int("seed"));
    cfg.split_seed = cfg.train.seed;
  }
  if (kv.has("split")) cfg.test_fraction = kv.get_double("split");
  if (kv.has("stl_inner")) cfg.stl_inner = static_cast<int>(kv.get_int("stl_inner"));
  if (kv.has("stl_outer")) cfg.stl_outer = static_cast<int>(kv.get_int("stl_outer"));
  return cfg;
}

std::array<int, 4> effective_windows(const PipelineConfig& config, size_t sample_count) {
  return config.autoscale_windows ? scaled_windows(config.windows, sample_count) : config.windows;
}

std::vector<ResidualSet> decompose_dataset(const Dataset& dataset,
                                           const std::array<int, 4>& windows, int stl_inner,
                                           int stl_outer) {
  validate_dataset(dataset);
  std::vector<ResidualSet> out(dataset.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(dataset.size()); ++i) {
    try {
      const auto& rec = dataset.records[i];
      out[i] = multi_decompose(rec.signal, windows, rec.id, stl_inner, stl_outer);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<LabeledSequence> featurize_residuals(std::span<const ResidualSet> residuals,
                                                 std::span<const Label> labels, int steps_k,
                                                 const DenoiseConfig& config,
                                                 bool denoise_enabled) {
  if (residuals.size() != labels.size())
    throw std::invalid_argument("featurize: residual and label counts differ");
  std::vector<LabeledSequence> out(residuals.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(residuals.size()); ++i) {
    try {
      out[i].sequence = build_sequence(residuals[i], steps_k, config, denoise_enabled);
      out[i].label = labels[i];
      out[i].id = residuals[i].signal_id;
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

namespace {

EvalReport report_from_predictions(std::vector<Prediction> predictions,
                                   const PipelineConfig& config) {
  EvalReport report;
  report.config_echo = config.to_kv().entries();
  report.predictions = std::move(predictions);
  std::vector<Label> pred, actual;
  for (const auto& p : report.predictions) {
    if (p.actual == Label::Unlabeled) continue;
    pred.push_back(p.predicted);
    actual.push_back(p.actual);
  }
  if (!pred.empty()) {
    report.confusion = confusion(pred, actual);
    report.metrics = metrics(report.confusion);
  }
  return report;
}

EvalReport report_from_sequences(const TrainedModel& model,
                                 std::span<const LabeledSequence> scaled,
                                 const PipelineConfig& config) {
  std::vector<Prediction> predictions(scaled.size());
  for (size_t i = 0; i < scaled.size(); ++i) {
    const double p = predict_probability(model.params, scaled[i].sequence);
    predictions[i] = {scaled[i].id, p, predicted_label(p, model.threshold), scaled[i].label};
  }
  return report_from_predictions(std::move(predictions), config);
}

}  // namespace

PipelineRun fit_from_features(std::span<const LabeledSequence> unscaled,
                              const PipelineConfig& config) {
  if (unscaled.empty()) throw std::invalid_argument("fit_from_features: no records");

  std::vector<LabeledSequence> pool(unscaled.begin(), unscaled.end());
  if (config.oversample_before_split && config.oversample_enabled)
    pool = oversample(pool, config.train.seed);

  std::vector<Label> labels;
  labels.reserve(pool.size());
  for (const auto& rec : pool) labels.push_back(rec.label);
  const auto in_test = test_membership(labels, config.test_fraction, config.split_seed, true);

  std::vector<LabeledSequence> train_set, test_set;
  for (size_t i = 0; i < pool.size(); ++i)
    (in_test[i] ? test_set : train_set).push_back(pool[i]);

  const Scaler scaler = fit_scaler(train_set);
  for (auto& rec : train_set) apply_scaler(scaler, rec.sequence);
  for (auto& rec : test_set) apply_scaler(scaler, rec.sequence);

  std::vector<LabeledSequence> fit_set = train_set;
  if (config.oversample_enabled && !config.oversample_before_split)
    fit_set = oversample(fit_set, config.train.seed);

  const FitResult fitted = fit_model(config.model, fit_set, config.train);

  PipelineRun run;
  run.model.kind = config.model;
  run.model.params = fitted.params;
  run.model.scaler = scaler;
  run.model.steps_k = config.steps_for(config.model);
  run.model.windows = config.windows;
  run.model.autoscale_windows = config.autoscale_windows;
  run.model.denoise = config.denoise;
  run.model.denoise_enabled = config.denoise_enabled;
  run.model.stl_inner = config.stl_inner;
  run.model.stl_outer = config.stl_outer;

  run.train_report = report_from_sequences(run.model, train_set, config);
  run.test_report = report_from_sequences(run.model, test_set, config);
  return run;
}

PipelineRun train_pipeline_on_residuals(std::span<const ResidualSet> residuals,
                                        const Dataset& dataset, const PipelineConfig& config) {
  std::vector<Label> labels;
  labels.reserve(dataset.size());
  for (const auto& rec : dataset.records) labels.push_back(rec.label);
  const auto features = featurize_residuals(residuals, labels, config.steps_for(config.model),
                                            config.denoise, config.denoise_enabled);
  return fit_from_features(features, config);
}

PipelineRun train_pipeline(const Dataset& dataset, const PipelineConfig& config) {
  const auto windows = effective_windows(config, dataset.sample_count());
  const auto residuals = decompose_dataset(dataset, windows, config.stl_inner, config.stl_outer);
  return train_pipeline_on_residuals(residuals, dataset, config);
}

namespace {

FeatureSequence features_for_signal(const TrainedModel& model, const Signal& signal,
                                    uint32_t id) {
  const auto windows = model.autoscale_windows
                           ? scaled_windows(model.windows, signal.sample_count())
                           : model.windows;
  const auto residuals = multi_decompose(signal, windows, id, model.stl_inner, model.stl_outer);
  FeatureSequence seq =
      build_sequence(residuals, model.steps_k, model.denoise, model.denoise_enabled);
  apply_scaler(model.scaler, seq);
  return seq;
}

}  // namespace

double classify_probability(const TrainedModel& model, const Signal& signal) {
  return predict_probability(model.params, features_for_signal(model, signal, 0));
}

std::vector<Prediction> predict_dataset(const TrainedModel& model, const Dataset& dataset) {
  validate_dataset(dataset);
  std::vector<Prediction> out(dataset.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(dataset.size()); ++i) {
    try {
      const auto& rec = dataset.records[i];
      const double p =
          predict_probability(model.params, features_for_signal(model, rec.signal, rec.id));
      out[i] = {rec.id, p, predicted_label(p, model.threshold), rec.label};
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

EvalReport evaluate_model(const TrainedModel& model, const Dataset& dataset) {
  auto predictions = predict_dataset(model, dataset);
  EvalReport report;
  report.predictions = std::move(predictions);
  std::vector<Label> pred, actual;
  for (const auto& p : report.predictions) {
    if (p.actual == Label::Unlabeled) continue;
    pred.push_back(p.predicted);
    actual.push_back(p.actual);
  }
  if (pred.empty()) throw std::invalid_argument("evaluate: dataset carries no labels");
  report.confusion = confusion(pred, actual);
  report.metrics = metrics(report.confusion);

  KvFile echo;
  echo.set("model", to_string(model.kind));
  echo.set("steps", static_cast<int64_t>(model.steps_k));
  echo.set("windows", std::span<const int>(model.windows));
  echo.set("autoscale_windows", as_flag(model.autoscale_windows));
  echo.set("trim_fraction", model.denoise.trim_fraction);
  echo.set("elbow", as_flag(model.denoise.elbow_enabled));
  echo.set("denoise", as_flag(model.denoise_enabled));
  echo.set("threshold", model.threshold);
  report.config_echo = echo.entries();
  return report;
}

ExperimentGrid experiment_grid_from_string(const std::string& name) {
  if (name == "time-steps") return ExperimentGrid::TimeSteps;
  if (name == "ablation") return ExperimentGrid::Ablation;
  if (name == "classifiers") return ExperimentGrid::Classifiers;
  throw std::invalid_argument("unknown experiment grid '" + name +
                              "' (expected time-steps, ablation, or classifiers)");
}

std::vector<EvalReport> run_experiment(ExperimentGrid grid, const Dataset& dataset,
                                       const PipelineConfig& config,
                                       const std::optional<std::filesystem::path>& out_dir) {
  const auto windows = effective_windows(config, dataset.sample_count());
  const auto residuals = decompose_dataset(dataset, windows, config.stl_inner, config.stl_outer);

  struct Cell {
    PipelineConfig config;
    std::vector<std::pair<std::string, std::string>> axis;
    std::string name;
  };
  std::vector<Cell> cells;

  switch (grid) {
    case ExperimentGrid::TimeSteps:
      for (const int k : {2, 4, 8}) {
        Cell cell{config, {{"time_steps", std::to_string(k)}}, "K" + std::to_string(k)};
        cell.config.steps_k = k;
        cells.push_back(std::move(cell));
      }
      break;
    case ExperimentGrid::Ablation:
      for (const bool dn : {true, false}) {
        for (const bool os : {true, false}) {
          Cell cell{config,
                    {{"denoise", dn ? "1" : "0"}, {"oversample", os ? "1" : "0"}},
                    std::string("denoise") + (dn ? "1" : "0") + "_oversample" + (os ? "1" : "0")};
          cell.config.denoise_enabled = dn;
          cell.config.oversample_enabled = os;
          cells.push_back(std::move(cell));
        }
      }
      break;
    case ExperimentGrid::Classifiers:
      for (const ModelKind kind :
           {ModelKind::Lstm, ModelKind::Fnn, ModelKind::Mlr, ModelKind::Rnn}) {
        Cell cell{config, {{"model", to_string(kind)}}, to_string(kind)};
        cell.config.model = kind;
        cells.push_back(std::move(cell));
      }
      break;
  }

  std::vector<EvalReport> reports;
  reports.reserve(cells.size());
  for (const auto& cell : cells) {
    PipelineRun run = train_pipeline_on_residuals(residuals, dataset, cell.config);
    run.test_report.axis = cell.axis;
    reports.push_back(std::move(run.test_report));
  }

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    const char* fig = grid == ExperimentGrid::TimeSteps  ? "fig11.csv"
                      : grid == ExperimentGrid::Ablation ? "fig12.csv"
                                                         : "fig13.csv";
    std::ofstream csv(*out_dir / fig, std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write " + (*out_dir / fig).string());
    for (const auto& [key, value] : reports.front().axis) csv << key << ',';
    csv << "f1_pd,f1_non_pd,f1_macro,recall_pd,recall_non_pd\n";
    for (const auto& report : reports) {
      for (const auto& [key, value] : report.axis) csv << value << ',';
      const auto& m = report.metrics;
      csv << m.pd.f1 << ',' << m.non_pd.f1 << ',' << m.macro.f1 << ',' << m.pd.recall << ','
          << m.non_pd.recall << '\n';
    }
    for (size_t i = 0; i < cells.size(); ++i)
      write_report_json(*out_dir / ("report_" + cells[i].name + ".json"), reports[i]);
  }
  return reports;
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::json j;
  for (const auto& [key, value] : report.config_echo) j["config"][key] = value;
  for (const auto& [key, value] : report.axis) j["axis"][key] = value;
  j["confusion"] = {{"tp", report.confusion.tp},
                    {"fp", report.confusion.fp},
                    {"tn", report.confusion.tn},
                    {"fn", report.confusion.fn}};
  const auto cls = [](const ClassMetrics& m) {
    return nlohmann::json{{"precision", m.precision},
                          {"recall", m.recall},
                          {"f1", m.f1},
                          {"degenerate", m.degenerate}};
  };
  j["metrics"] = {{"pd", cls(report.metrics.pd)},
                  {"non_pd", cls(report.metrics.non_pd)},
                  {"macro", cls(report.metrics.macro)}};
  j["predictions"] = nlohmann::json::array();
  for (const auto& p : report.predictions) {
    j["predictions"].push_back({{"id", p.id},
                                {"probability", p.probability},
                                {"predicted", label_code(p.predicted)},
                                {"actual", label_code(p.actual)}});
  }
  return j.dump(2);
}

void write_report_json(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << report_to_json(report) << '\n';
}

}  // namespace ccpd
