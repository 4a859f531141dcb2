// Command-line front end: synth -> decompose -> featurize -> train ->
// predict/evaluate/experiment, with artifacts on disk between stages.

#include <omp.h>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccpd/artifacts.hpp"
#include "ccpd/model_io.hpp"
#include "ccpd/pipeline.hpp"
#include "ccpd/signal_io.hpp"
#include "ccpd/synth.hpp"

namespace {

using namespace ccpd;

// Pipeline options shared by train/featurize/experiment. CLI flags override
// --config file values, which override the built-in defaults.
struct PipelineCli {
  CLI::Option* config = nullptr;
  CLI::Option* windows = nullptr;
  CLI::Option* steps = nullptr;
  CLI::Option* trim = nullptr;
  CLI::Option* no_elbow = nullptr;
  CLI::Option* no_denoise = nullptr;
  CLI::Option* no_oversample = nullptr;
  CLI::Option* oversample_before_split = nullptr;
  CLI::Option* model = nullptr;
  CLI::Option* hidden = nullptr;
  CLI::Option* epochs = nullptr;
  CLI::Option* lr = nullptr;
  CLI::Option* batch = nullptr;
  CLI::Option* optimizer = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* split = nullptr;
  CLI::Option* no_autoscale = nullptr;
  CLI::Option* stl_inner = nullptr;
  CLI::Option* stl_outer = nullptr;

  std::string config_path;
  std::vector<int> windows_value;
  int steps_value = 4;
  double trim_value = 0.05;
  std::string model_value = "lstm";
  int hidden_value = 16;
  int epochs_value = 200;
  double lr_value = 1e-2;
  int batch_value = 32;
  std::string optimizer_value = "adam";
  uint64_t seed_value = 0;
  double split_value = 0.2;
  int stl_inner_value = 2;
  int stl_outer_value = 1;

  void attach(CLI::App* cmd) {
    config = cmd->add_option("--config", config_path, "key = value config file");
    windows = cmd->add_option("--windows", windows_value, "four seasonal periods")->expected(4);
    steps = cmd->add_option("--steps", steps_value, "time steps per cycle (1, 2, 4, or 8)");
    trim = cmd->add_option("--trim", trim_value, "transient trim fraction");
    no_elbow = cmd->add_flag("--no-elbow", "disable the background-noise elbow threshold");
    no_denoise = cmd->add_flag("--no-denoise", "feature raw residuals (ablation)");
    no_oversample = cmd->add_flag("--no-oversample", "train on the imbalanced data as-is");
    oversample_before_split = cmd->add_flag("--oversample-before-split",
                                            "duplicate minority records before splitting");
    model = cmd->add_option("--model", model_value, "classifier kind")
                ->check(CLI::IsMember({"lstm", "rnn", "fnn", "mlr"}));
    hidden = cmd->add_option("--hidden", hidden_value, "recurrent hidden size");
    epochs = cmd->add_option("--epochs", epochs_value, "training epochs");
    lr = cmd->add_option("--lr", lr_value, "learning rate");
    batch = cmd->add_option("--batch", batch_value, "mini-batch size");
    optimizer = cmd->add_option("--optimizer", optimizer_value, "sgd or adam")
                    ->check(CLI::IsMember({"sgd", "adam"}));
    seed = cmd->add_option("--seed", seed_value, "seed for split, init, and shuffling");
    split = cmd->add_option("--split", split_value, "held-out test fraction");
    no_autoscale = cmd->add_flag("--no-autoscale", "use the window lengths verbatim");
    stl_inner = cmd->add_option("--stl-inner", stl_inner_value, "STL inner iterations");
    stl_outer = cmd->add_option("--stl-outer", stl_outer_value, "STL robustness iterations");
  }

  PipelineConfig build() const {
    PipelineConfig cfg;
    if (config->count()) cfg = PipelineConfig::from_kv(KvFile::parse(config_path));
    if (windows->count())
      for (size_t i = 0; i < 4; ++i) cfg.windows[i] = windows_value[i];
    if (steps->count()) cfg.steps_k = steps_value;
    if (trim->count()) cfg.denoise.trim_fraction = trim_value;
    if (no_elbow->count()) cfg.denoise.elbow_enabled = false;
    if (no_denoise->count()) cfg.denoise_enabled = false;
    if (no_oversample->count()) cfg.oversample_enabled = false;
    if (oversample_before_split->count()) cfg.oversample_before_split = true;
    if (model->count()) cfg.model = model_kind_from_string(model_value);
    if (hidden->count()) cfg.train.hidden_size = hidden_value;
    if (epochs->count()) cfg.train.epochs = epochs_value;
    if (lr->count()) cfg.train.learning_rate = lr_value;
    if (batch->count()) cfg.train.batch_size = batch_value;
    if (optimizer->count())
      cfg.train.optimizer = optimizer_value == "adam" ? Optimizer::Adam : Optimizer::Sgd;
    if (seed->count()) {
      cfg.train.seed = seed_value;
      cfg.split_seed = seed_value;
    }
    if (split->count()) cfg.test_fraction = split_value;
    if (no_autoscale->count()) cfg.autoscale_windows = false;
    if (stl_inner->count()) cfg.stl_inner = stl_inner_value;
    if (stl_outer->count()) cfg.stl_outer = stl_outer_value;
    return cfg;
  }
};

FileFormat format_from_name(const std::string& name) {
  if (name == "binary") return FileFormat::Binary;
  if (name == "csv") return FileFormat::Csv;
  throw std::runtime_error("unknown format '" + name + "' (expected binary or csv)");
}

enum class InputKind { Signals, Features };

InputKind sniff_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    return line.rfind("id,label,step", 0) == 0 ? InputKind::Features : InputKind::Signals;
  }
  return InputKind::Signals;
}

void print_report_summary(const char* tag, const EvalReport& report) {
  const auto& m = report.metrics;
  std::printf("%s: tp=%llu fp=%llu tn=%llu fn=%llu\n", tag,
              static_cast<unsigned long long>(report.confusion.tp),
              static_cast<unsigned long long>(report.confusion.fp),
              static_cast<unsigned long long>(report.confusion.tn),
              static_cast<unsigned long long>(report.confusion.fn));
  std::printf("%s: PD     precision %.4f recall %.4f f1 %.4f\n", tag, m.pd.precision, m.pd.recall,
              m.pd.f1);
  std::printf("%s: non-PD precision %.4f recall %.4f f1 %.4f\n", tag, m.non_pd.precision,
              m.non_pd.recall, m.non_pd.f1);
  std::printf("%s: macro  precision %.4f recall %.4f f1 %.4f\n", tag, m.macro.precision,
              m.macro.recall, m.macro.f1);
}

int run(int argc, char** argv) {
  CLI::App app{"Partial-discharge detection on covered-conductor waveforms"};
  app.require_subcommand(1);
  app.fallthrough();

  int jobs = 0;
  app.add_option("--jobs", jobs, "parallel worker bound (default: all cores)");
  const auto apply_jobs = [&] {
    if (jobs > 0) omp_set_num_threads(jobs);
  };

  // --- synth ---------------------------------------------------------------
  auto* synth_cmd = app.add_subcommand("synth", "generate a labeled synthetic dataset");
  size_t synth_pd = 0, synth_non_pd = 0;
  size_t synth_samples = 8000;
  uint64_t synth_seed = 0;
  std::string synth_out, synth_format = "binary";
  double synth_amplitude = 1000.0, synth_sigma = 12.0;
  std::vector<double> burst_window{0.2, 0.45};
  int burst_pulses = 60;
  std::vector<double> burst_amp{60.0, 220.0};
  std::vector<std::string> spike_specs;
  synth_cmd->add_option("--pd", synth_pd, "number of PD records");
  synth_cmd->add_option("--non-pd", synth_non_pd, "number of non-PD records");
  synth_cmd->add_option("--samples", synth_samples, "samples per signal");
  synth_cmd->add_option("--seed", synth_seed, "generator seed");
  synth_cmd->add_option("-o,--out", synth_out, "output dataset path")->required();
  synth_cmd->add_option("--format", synth_format, "binary or csv")
      ->check(CLI::IsMember({"binary", "csv"}));
  synth_cmd->add_option("--amplitude", synth_amplitude, "fundamental amplitude");
  synth_cmd->add_option("--noise-sigma", synth_sigma, "gaussian background sigma");
  synth_cmd->add_option("--burst-window", burst_window, "burst [start end) cycle fractions")
      ->expected(2);
  synth_cmd->add_option("--burst-pulses", burst_pulses, "pulses per burst");
  synth_cmd->add_option("--burst-amp", burst_amp, "pulse amplitude range [lo hi]")->expected(2);
  synth_cmd->add_option("--spike", spike_specs, "transient spike as position:amplitude");

  synth_cmd->callback([&] {
    apply_jobs();
    SynthSpec spec;
    spec.sample_count = synth_samples;
    spec.fundamental_amplitude = synth_amplitude;
    spec.harmonic_amplitudes = {{3, synth_amplitude * 0.08}, {5, synth_amplitude * 0.04}};
    spec.background_noise_sigma = synth_sigma;
    spec.pd_bursts.push_back(
        {burst_window[0], burst_window[1], burst_pulses, burst_amp[0], burst_amp[1]});
    for (const auto& s : spike_specs) {
      const auto colon = s.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("spike spec '" + s + "' must be position:amplitude");
      spec.transient_spikes.push_back(
          {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))});
    }
    const Dataset dataset = generate_dataset(synth_pd, synth_non_pd, spec, synth_seed);
    save_dataset(dataset, synth_out, format_from_name(synth_format));
    std::printf("synth: wrote %zu records (%zu PD, %zu non-PD), %zu samples each, to %s\n",
                dataset.size(), synth_pd, synth_non_pd, synth_samples, synth_out.c_str());
  });

  // --- decompose -----------------------------------------------------------
  auto* dec_cmd = app.add_subcommand("decompose", "STL-decompose every signal, keep residuals");
  std::string dec_in, dec_out, dec_dump;
  PipelineCli dec_opts;
  dec_opts.attach(dec_cmd);
  dec_cmd->add_option("-i,--in", dec_in, "signals file (binary or csv)")->required();
  dec_cmd->add_option("-o,--out", dec_out, "residual artifact path")->required();
  dec_cmd->add_option("--dump-csv", dec_dump, "directory for t,trend,seasonal,residual dumps");

  dec_cmd->callback([&] {
    apply_jobs();
    const PipelineConfig cfg = dec_opts.build();
    const Dataset dataset = load_dataset(dec_in, detect_format(dec_in));
    const auto windows = effective_windows(cfg, dataset.sample_count());
    const auto residuals = decompose_dataset(dataset, windows, cfg.stl_inner, cfg.stl_outer);
    if (!dec_dump.empty()) {
      std::filesystem::create_directories(dec_dump);
      for (const auto& rec : dataset.records) {
        for (const int w : windows) {
          StlConfig stl;
          stl.period = w;
          stl.inner_iterations = cfg.stl_inner;
          stl.outer_iterations = cfg.stl_outer;
          const auto d = stl_decompose(rec.signal, stl);
          dump_decomposition_csv(std::filesystem::path(dec_dump) /
                                     ("decomp_" + std::to_string(rec.id) + "_w" +
                                      std::to_string(w) + ".csv"),
                                 d);
        }
      }
    }
    KvFile echo = cfg.to_kv();
    echo.set("effective_windows", std::span<const int>(windows));
    echo.set("source", dec_in);
    save_residuals(dec_out, residuals, dataset.records, echo);
    std::printf("decompose: %zu records x 4 windows {%d, %d, %d, %d} -> %s\n", dataset.size(),
                windows[0], windows[1], windows[2], windows[3], dec_out.c_str());
  });

  // --- featurize -----------------------------------------------------------
  auto* feat_cmd = app.add_subcommand("featurize", "residuals -> per-step feature vectors");
  std::string feat_in, feat_out;
  PipelineCli feat_opts;
  feat_opts.attach(feat_cmd);
  feat_cmd->add_option("-i,--in", feat_in, "residual artifact")->required();
  feat_cmd->add_option("-o,--out", feat_out, "feature CSV path")->required();

  feat_cmd->callback([&] {
    apply_jobs();
    const PipelineConfig cfg = feat_opts.build();
    const ResidualFile file = load_residuals(feat_in);
    const auto sequences = featurize_residuals(file.residuals, file.labels, cfg.steps_k,
                                               cfg.denoise, cfg.denoise_enabled);
    KvFile echo = cfg.to_kv();
    echo.set("source", feat_in);
    save_features(feat_out, sequences, echo);
    std::printf("featurize: %zu records, %d steps x %d features -> %s\n", sequences.size(),
                cfg.steps_k, kFeatureDims, feat_out.c_str());
  });

  // --- train ---------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "train a classifier (full flow from signals, or "
                                             "from a feature CSV)");
  std::string train_in, train_out, train_report_path;
  PipelineCli train_opts;
  train_opts.attach(train_cmd);
  train_cmd->add_option("-i,--in", train_in, "signals file or feature CSV")->required();
  train_cmd->add_option("-o,--out", train_out, "model file path")->required();
  train_cmd->add_option("--report", train_report_path, "write the test-split report JSON here");

  train_cmd->callback([&] {
    apply_jobs();
    PipelineConfig cfg = train_opts.build();
    PipelineRun run = [&] {
      if (sniff_input(train_in) == InputKind::Features) {
        const FeatureFile file = load_features(train_in);
        // The artifact's provenance determines the preprocessing settings the
        // model must carry; explicit flags still win.
        PipelineConfig artifact_cfg = PipelineConfig::from_kv(file.config);
        artifact_cfg.model = cfg.model;
        artifact_cfg.train = cfg.train;
        artifact_cfg.test_fraction = cfg.test_fraction;
        artifact_cfg.split_seed = cfg.split_seed;
        artifact_cfg.oversample_enabled = cfg.oversample_enabled;
        artifact_cfg.oversample_before_split = cfg.oversample_before_split;
        const int steps = file.sequences.front().sequence.step_count();
        if (artifact_cfg.steps_for(artifact_cfg.model) != steps)
          throw std::runtime_error("feature file carries " + std::to_string(steps) +
                                   " steps but the " + to_string(artifact_cfg.model) +
                                   " model expects " +
                                   std::to_string(artifact_cfg.steps_for(artifact_cfg.model)));
        cfg = artifact_cfg;
        return fit_from_features(file.sequences, cfg);
      }
      const Dataset dataset = load_dataset(train_in, detect_format(train_in));
      return train_pipeline(dataset, cfg);
    }();

    save_model(run.model, train_out);
    std::printf("train: %s model -> %s\n", to_string(run.model.kind).c_str(), train_out.c_str());
    print_report_summary("train-split", run.train_report);
    print_report_summary("test-split", run.test_report);
    if (!train_report_path.empty()) write_report_json(train_report_path, run.test_report);
  });

  // --- predict ---------------------------------------------------------------
  auto* pred_cmd = app.add_subcommand("predict", "per-signal probabilities from a trained model");
  std::string pred_model, pred_in, pred_out;
  pred_cmd->add_option("-m,--model", pred_model, "model file")->required();
  pred_cmd->add_option("-i,--in", pred_in, "signals file")->required();
  pred_cmd->add_option("-o,--out", pred_out, "prediction CSV path")->required();

  pred_cmd->callback([&] {
    apply_jobs();
    const TrainedModel model = load_model(pred_model);
    const Dataset dataset = load_dataset(pred_in, detect_format(pred_in));
    const auto predictions = predict_dataset(model, dataset);
    std::ofstream out(pred_out, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + pred_out);
    out << "id,probability,predicted,actual\n";
    for (const auto& p : predictions) {
      out << p.id << ',' << KvFile::format_double(p.probability) << ','
          << static_cast<int>(p.predicted) << ','
          << (p.actual == Label::Unlabeled ? -1 : static_cast<int>(p.actual)) << '\n';
    }
    std::printf("predict: %zu records -> %s\n", predictions.size(), pred_out.c_str());
  });

  // --- evaluate --------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("evaluate", "confusion matrix and metrics on labeled signals");
  std::string eval_model, eval_in, eval_out, eval_summary;
  eval_cmd->add_option("-m,--model", eval_model, "model file")->required();
  eval_cmd->add_option("-i,--in", eval_in, "labeled signals file")->required();
  eval_cmd->add_option("-o,--out", eval_out, "report JSON path")->required();
  eval_cmd->add_option("--summary", eval_summary, "also write a one-line summary CSV");

  eval_cmd->callback([&] {
    apply_jobs();
    const TrainedModel model = load_model(eval_model);
    const Dataset dataset = load_dataset(eval_in, detect_format(eval_in));
    const EvalReport report = evaluate_model(model, dataset);
    write_report_json(eval_out, report);
    if (!eval_summary.empty()) {
      std::ofstream out(eval_summary, std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + eval_summary);
      out << "f1_pd,f1_non_pd,f1_macro,recall_pd,recall_non_pd\n"
          << report.metrics.pd.f1 << ',' << report.metrics.non_pd.f1 << ','
          << report.metrics.macro.f1 << ',' << report.metrics.pd.recall << ','
          << report.metrics.non_pd.recall << '\n';
    }
    print_report_summary("evaluate", report);
    std::printf("evaluate: report -> %s\n", eval_out.c_str());
  });

  // --- experiment ------------------------------------------------------------
  auto* exp_cmd = app.add_subcommand("experiment", "run a comparison grid with a shared split");
  std::string exp_grid, exp_in, exp_out;
  PipelineCli exp_opts;
  exp_opts.attach(exp_cmd);
  exp_cmd->add_option("--grid", exp_grid, "time-steps, ablation, or classifiers")->required();
  exp_cmd->add_option("-i,--in", exp_in, "labeled signals file")->required();
  exp_cmd->add_option("-o,--out", exp_out, "output directory")->required();

  exp_cmd->callback([&] {
    apply_jobs();
    const PipelineConfig cfg = exp_opts.build();
    const Dataset dataset = load_dataset(exp_in, detect_format(exp_in));
    const auto grid = experiment_grid_from_string(exp_grid);
    const auto reports = run_experiment(grid, dataset, cfg, std::filesystem::path(exp_out));
    for (const auto& report : reports) {
      std::string tag;
      for (const auto& [key, value] : report.axis) tag += key + "=" + value + " ";
      std::printf("%s-> macro F1 %.4f (PD F1 %.4f, recall %.4f)\n", tag.c_str(),
                  report.metrics.macro.f1, report.metrics.pd.f1, report.metrics.pd.recall);
    }
    std::printf("experiment: %zu cells -> %s\n", reports.size(), exp_out.c_str());
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
