#include "ccpd/model_io.hpp"

#include <stdexcept>
#include <string>

namespace ccpd {

namespace {

constexpr int64_t kModelVersion = 1;

void put_block(KvFile& kv, const std::string& key, std::span<const double> values) {
  kv.set(key, values);
}

std::vector<double> get_block(const KvFile& kv, const std::string& key, size_t expected) {
  auto values = kv.get_array(key);
  if (values.size() != expected)
    throw std::runtime_error("model file: field '" + key + "' has " +
                             std::to_string(values.size()) + " values, expected " +
                             std::to_string(expected));
  return values;
}

void copy_into(std::span<double> dst, std::span<const double> src) {
  std::copy(src.begin(), src.end(), dst.begin());
}

const char* gate_name(int g) {
  switch (g) {
    case kGateForget: return "W_f";
    case kGateInput: return "W_i";
    case kGateOutput: return "W_o";
    default: return "W_c";
  }
}

const char* gate_bias_name(int g) {
  switch (g) {
    case kGateForget: return "b_f";
    case kGateInput: return "b_i";
    case kGateOutput: return "b_o";
    default: return "b_c";
  }
}

}  // namespace

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  KvFile kv;
  kv.set("kind", to_string(model.kind));
  kv.set("version", kModelVersion);

  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LstmParams>) {
          kv.set("hidden_size", static_cast<int64_t>(p.hidden_size));
          kv.set("input_size", static_cast<int64_t>(p.input_size));
        } else if constexpr (std::is_same_v<P, RnnParams>) {
          kv.set("hidden_size", static_cast<int64_t>(p.hidden_size));
          kv.set("input_size", static_cast<int64_t>(p.input_size));
        }
      },
      model.params);

  kv.set("steps", static_cast<int64_t>(model.steps_k));
  kv.set("windows", std::span<const int>(model.windows));
  kv.set("autoscale_windows", static_cast<int64_t>(model.autoscale_windows ? 1 : 0));
  kv.set("trim_fraction", model.denoise.trim_fraction);
  kv.set("elbow", static_cast<int64_t>(model.denoise.elbow_enabled ? 1 : 0));
  kv.set("denoise", static_cast<int64_t>(model.denoise_enabled ? 1 : 0));
  kv.set("stl_inner", static_cast<int64_t>(model.stl_inner));
  kv.set("stl_outer", static_cast<int64_t>(model.stl_outer));
  kv.set("threshold", model.threshold);
  kv.set("scaler_min", std::span<const double>(model.scaler.min));
  kv.set("scaler_max", std::span<const double>(model.scaler.max));

  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LstmParams>) {
          for (int g = 0; g < 4; ++g) put_block(kv, gate_name(g), p.w_gate(g));
          for (int g = 0; g < 4; ++g) put_block(kv, gate_bias_name(g), p.b_gate(g));
          put_block(kv, "W_out", p.w_out());
          kv.set("b_out", p.b_out());
        } else if constexpr (std::is_same_v<P, RnnParams>) {
          put_block(kv, "W_h", p.w_h());
          put_block(kv, "W_x", p.w_x());
          put_block(kv, "W_out", p.w_out());
          kv.set("b_out", p.b_out());
        } else if constexpr (std::is_same_v<P, FnnParams>) {
          constexpr int in = FnnParams::kInput, h = FnnParams::kHidden;
          const double* t = p.theta.data();
          put_block(kv, "W1", {t, static_cast<size_t>(h * in)});
          put_block(kv, "b1", {t + h * in, static_cast<size_t>(h)});
          put_block(kv, "W2", {t + h * in + h, static_cast<size_t>(h * h)});
          put_block(kv, "b2", {t + h * in + h + h * h, static_cast<size_t>(h)});
          put_block(kv, "W3", {t + h * in + h + h * h + h, static_cast<size_t>(h)});
          kv.set("b3", p.theta.back());
        } else {
          put_block(kv, "w", {p.theta.data(), static_cast<size_t>(MlrParams::kInput)});
          kv.set("b", p.theta.back());
        }
      },
      model.params);

  kv.write(path);
}

TrainedModel load_model(const std::filesystem::path& path) {
  const KvFile kv = KvFile::parse(path);
  TrainedModel model;
  model.kind = model_kind_from_string(kv.get_string("kind"));
  const int64_t version = kv.get_int("version");
  if (version != kModelVersion)
    throw std::runtime_error("model file: unsupported version " + std::to_string(version));

  model.steps_k = static_cast<int>(kv.get_int("steps"));
  const auto windows = kv.get_array("windows");
  if (windows.size() != 4) throw std::runtime_error("model file: windows must list 4 periods");
  for (size_t i = 0; i < 4; ++i) model.windows[i] = static_cast<int>(windows[i]);
  model.autoscale_windows = kv.get_int("autoscale_windows") != 0;
  model.denoise.trim_fraction = kv.get_double("trim_fraction");
  model.denoise.elbow_enabled = kv.get_int("elbow") != 0;
  model.denoise_enabled = kv.get_int("denoise") != 0;
  model.stl_inner = static_cast<int>(kv.get_int("stl_inner"));
  model.stl_outer = static_cast<int>(kv.get_int("stl_outer"));
  model.threshold = kv.get_double("threshold");

  const auto smin = get_block(kv, "scaler_min", kFeatureDims);
  const auto smax = get_block(kv, "scaler_max", kFeatureDims);
  std::copy(smin.begin(), smin.end(), model.scaler.min.begin());
  std::copy(smax.begin(), smax.end(), model.scaler.max.begin());
  model.scaler.fitted = true;

  switch (model.kind) {
    case ModelKind::Lstm: {
      const int hidden = static_cast<int>(kv.get_int("hidden_size"));
      const int input = static_cast<int>(kv.get_int("input_size"));
      if (hidden < 1 || input != kFeatureDims)
        throw std::runtime_error("model file: invalid lstm shape fields");
      LstmParams p(hidden, input);
      for (int g = 0; g < 4; ++g)
        copy_into(p.w_gate(g), get_block(kv, gate_name(g), p.gate_weights()));
      for (int g = 0; g < 4; ++g)
        copy_into(p.b_gate(g), get_block(kv, gate_bias_name(g), static_cast<size_t>(hidden)));
      copy_into(p.w_out(), get_block(kv, "W_out", static_cast<size_t>(hidden)));
      p.b_out() = kv.get_double("b_out");
      model.params = std::move(p);
      break;
    }
    case ModelKind::Rnn: {
      const int hidden = static_cast<int>(kv.get_int("hidden_size"));
      const int input = static_cast<int>(kv.get_int("input_size"));
      if (hidden < 1 || input != kFeatureDims)
        throw std::runtime_error("model file: invalid rnn shape fields");
      RnnParams p(hidden, input);
      copy_into(p.w_h(), get_block(kv, "W_h", static_cast<size_t>(hidden) * hidden));
      copy_into(p.w_x(), get_block(kv, "W_x", static_cast<size_t>(hidden) * input));
      copy_into(p.w_out(), get_block(kv, "W_out", static_cast<size_t>(hidden)));
      p.b_out() = kv.get_double("b_out");
      model.params = std::move(p);
      break;
    }
    case ModelKind::Fnn: {
      constexpr int in = FnnParams::kInput, h = FnnParams::kHidden;
      FnnParams p;
      double* t = p.theta.data();
      copy_into({t, static_cast<size_t>(h * in)}, get_block(kv, "W1", h * in));
      copy_into({t + h * in, static_cast<size_t>(h)}, get_block(kv, "b1", h));
      copy_into({t + h * in + h, static_cast<size_t>(h * h)}, get_block(kv, "W2", h * h));
      copy_into({t + h * in + h + h * h, static_cast<size_t>(h)}, get_block(kv, "b2", h));
      copy_into({t + h * in + h + h * h + h, static_cast<size_t>(h)}, get_block(kv, "W3", h));
      p.theta.back() = kv.get_double("b3");
      model.params = std::move(p);
      break;
    }
    case ModelKind::Mlr: {
      MlrParams p;
      copy_into({p.theta.data(), static_cast<size_t>(MlrParams::kInput)},
                get_block(kv, "w", MlrParams::kInput));
      p.theta.back() = kv.get_double("b");
      model.params = std::move(p);
      break;
    }
  }
  return model;
}

}  // namespace ccpd
