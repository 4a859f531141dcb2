#include "ccpd/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ccpd {

namespace {

ModelParams make_params(ModelKind kind, int hidden) {
  switch (kind) {
    case ModelKind::Lstm: return LstmParams(hidden, kFeatureDims);
    case ModelKind::Rnn: return RnnParams(hidden, kFeatureDims);
    case ModelKind::Fnn: return FnnParams();
    case ModelKind::Mlr: return MlrParams();
  }
  throw std::logic_error("unreachable model kind");
}

std::vector<double>& theta_of(ModelParams& params) {
  return std::visit([](auto& p) -> std::vector<double>& { return p.theta; }, params);
}

void init_variant(ModelParams& params, Rng& rng) {
  std::visit([&](auto& p) { init_params(p, rng); }, params);
}

// Returns the BCE loss and fills `grad` (sized to the parameter count).
double loss_and_gradient(const ModelParams& params, const FeatureSequence& sequence, double label,
                         std::vector<double>& grad) {
  if (const auto* p = std::get_if<LstmParams>(&params)) {
    const auto fwd = lstm_forward(*p, sequence);
    grad = lstm_backward(*p, sequence, fwd, label);
    return bce_loss_from_logit(fwd.logit, label);
  }
  if (const auto* p = std::get_if<RnnParams>(&params)) {
    const auto fwd = rnn_forward(*p, sequence);
    grad = rnn_backward(*p, sequence, fwd, label);
    return bce_loss_from_logit(fwd.logit, label);
  }
  if (const auto* p = std::get_if<FnnParams>(&params)) {
    const auto fwd = fnn_forward(*p, sequence);
    grad = fnn_backward(*p, sequence, fwd, label);
    return bce_loss_from_logit(fwd.logit, label);
  }
  const auto& p = std::get<MlrParams>(params);
  const auto fwd = mlr_forward(p, sequence);
  grad = mlr_backward(p, sequence, fwd, label);
  return bce_loss_from_logit(fwd.logit, label);
}

double predict_logit(const ModelParams& params, const FeatureSequence& sequence) {
  return std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LstmParams>) return lstm_forward(p, sequence).logit;
        else if constexpr (std::is_same_v<P, RnnParams>) return rnn_forward(p, sequence).logit;
        else if constexpr (std::is_same_v<P, FnnParams>) return fnn_forward(p, sequence).logit;
        else return mlr_forward(p, sequence).logit;
      },
      params);
}

double label_value(Label label) {
  switch (label) {
    case Label::Pd: return 1.0;
    case Label::NonPd: return 0.0;
    default: throw std::invalid_argument("training requires labeled records");
  }
}

}  // namespace

double predict_probability(const ModelParams& params, const FeatureSequence& sequence) {
  return std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LstmParams>) return lstm_forward(p, sequence).probability;
        else if constexpr (std::is_same_v<P, RnnParams>) return rnn_forward(p, sequence).probability;
        else if constexpr (std::is_same_v<P, FnnParams>) return fnn_forward(p, sequence).probability;
        else return mlr_forward(p, sequence).probability;
      },
      params);
}

FitResult fit_model(ModelKind kind, std::span<const LabeledSequence> records,
                    const TrainConfig& config) {
  if (records.empty()) throw std::invalid_argument("fit_model: no training records");
  if (config.batch_size < 1) throw std::invalid_argument("fit_model: batch_size must be >= 1");
  if (config.epochs < 0) throw std::invalid_argument("fit_model: epochs must be >= 0");
  if (config.learning_rate < 0.0)
    throw std::invalid_argument("fit_model: learning_rate must be >= 0");
  for (const auto& rec : records) (void)label_value(rec.label);

  Rng rng(config.seed);
  FitResult result;
  result.kind = kind;
  result.params = make_params(kind, config.hidden_size);
  init_variant(result.params, rng);

  auto& theta = theta_of(result.params);
  const size_t dim = theta.size();

  // Optional validation carve-out: shuffle once, hold out the tail.
  std::vector<size_t> order(records.size());
  std::iota(order.begin(), order.end(), size_t{0});
  size_t val_count = 0;
  if (config.validation_fraction > 0.0) {
    for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.next_below(i)]);
    val_count = static_cast<size_t>(config.validation_fraction * static_cast<double>(order.size()));
    val_count = std::min(val_count, order.size() - 1);
  }
  std::vector<size_t> val(order.end() - static_cast<long>(val_count), order.end());
  order.resize(order.size() - val_count);
  const size_t n = order.size();

  std::vector<double> adam_m, adam_v;
  if (config.optimizer == Optimizer::Adam) {
    adam_m.assign(dim, 0.0);
    adam_v.assign(dim, 0.0);
  }
  long adam_t = 0;

  const size_t batch = std::min<size_t>(config.batch_size, n);
  std::vector<std::vector<double>> record_grads(batch);
  std::vector<double> record_loss(batch);
  std::vector<double> grad(dim);

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> best_theta;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.next_below(i)]);

    double epoch_loss = 0.0;
    for (size_t start = 0; start < n; start += batch) {
      const size_t count = std::min(batch, n - start);

#pragma omp parallel for schedule(dynamic)
      for (long r = 0; r < static_cast<long>(count); ++r) {
        const auto& rec = records[order[start + r]];
        record_loss[r] = loss_and_gradient(result.params, rec.sequence, label_value(rec.label),
                                           record_grads[r]);
      }

      // Fixed-order reduction keeps training bitwise deterministic across
      // thread counts.
      std::fill(grad.begin(), grad.end(), 0.0);
      for (size_t r = 0; r < count; ++r) {
        epoch_loss += record_loss[r];
        for (size_t d = 0; d < dim; ++d) grad[d] += record_grads[r][d];
      }
      const double inv = 1.0 / static_cast<double>(count);
      for (double& g : grad) g *= inv;

      if (config.grad_clip_norm > 0.0) {
        double ss = 0.0;
        for (const double g : grad) ss += g * g;
        const double norm = std::sqrt(ss);
        if (norm > config.grad_clip_norm) {
          const double scale = config.grad_clip_norm / norm;
          for (double& g : grad) g *= scale;
        }
      }

      if (config.optimizer == Optimizer::Adam) {
        ++adam_t;
        const double b1 = config.adam_beta1, b2 = config.adam_beta2;
        const double c1 = 1.0 - std::pow(b1, static_cast<double>(adam_t));
        const double c2 = 1.0 - std::pow(b2, static_cast<double>(adam_t));
        for (size_t d = 0; d < dim; ++d) {
          adam_m[d] = b1 * adam_m[d] + (1.0 - b1) * grad[d];
          adam_v[d] = b2 * adam_v[d] + (1.0 - b2) * grad[d] * grad[d];
          theta[d] -= config.learning_rate * (adam_m[d] / c1) /
                      (std::sqrt(adam_v[d] / c2) + config.adam_eps);
        }
      } else {
        for (size_t d = 0; d < dim; ++d) theta[d] -= config.learning_rate * grad[d];
      }
    }

    epoch_loss /= static_cast<double>(n);
    if (!std::isfinite(epoch_loss))
      throw std::runtime_error("training diverged: non-finite loss at epoch " +
                               std::to_string(epoch));
    result.epoch_loss.push_back(epoch_loss);

    if (val_count > 0) {
      double val_loss = 0.0;
      for (const size_t idx : val) {
        const auto& rec = records[idx];
        val_loss += bce_loss_from_logit(predict_logit(result.params, rec.sequence),
                                        label_value(rec.label));
      }
      val_loss /= static_cast<double>(val_count);
      if (val_loss < best_val) {
        best_val = val_loss;
        best_theta = theta;
      }
    }
  }

  if (val_count > 0 && !best_theta.empty()) theta = best_theta;
  return result;
}

}  // namespace ccpd
