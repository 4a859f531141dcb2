#pragma once

#include <span>
#include <string>
#include <vector>

#include "ccpd/features.hpp"
#include "ccpd/rng.hpp"

namespace ccpd {

enum class ModelKind { Lstm, Rnn, Fnn, Mlr };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// All parameters live in one flat vector with a fixed layout, so the
/// optimizer, gradient clipping, finite-difference checks, and serialization
/// can treat every model uniformly. Named spans expose the blocks.
///
/// Layout: W_f, W_i, W_o, W_c (each hidden x (hidden+input), row-major),
/// b_f, b_i, b_o, b_c (hidden), W_out (hidden), b_out (1).
struct LstmParams {
  int hidden_size = 16;
  int input_size = kFeatureDims;
  std::vector<double> theta;

  LstmParams() = default;
  LstmParams(int hidden, int input);

  int concat_size() const { return hidden_size + input_size; }
  size_t gate_weights() const { return static_cast<size_t>(hidden_size) * concat_size(); }
  size_t param_count() const { return 4 * gate_weights() + 4 * hidden_size + hidden_size + 1; }

  std::span<double> w_gate(int g) { return {theta.data() + g * gate_weights(), gate_weights()}; }
  std::span<const double> w_gate(int g) const { return {theta.data() + g * gate_weights(), gate_weights()}; }
  std::span<double> b_gate(int g) { return {theta.data() + 4 * gate_weights() + g * hidden_size, static_cast<size_t>(hidden_size)}; }
  std::span<const double> b_gate(int g) const { return {theta.data() + 4 * gate_weights() + g * hidden_size, static_cast<size_t>(hidden_size)}; }
  std::span<double> w_out() { return {theta.data() + 4 * gate_weights() + 4 * hidden_size, static_cast<size_t>(hidden_size)}; }
  std::span<const double> w_out() const { return {theta.data() + 4 * gate_weights() + 4 * hidden_size, static_cast<size_t>(hidden_size)}; }
  double& b_out() { return theta.back(); }
  double b_out() const { return theta.back(); }
};

// Gate block indices within LstmParams.
inline constexpr int kGateForget = 0;
inline constexpr int kGateInput = 1;
inline constexpr int kGateOutput = 2;
inline constexpr int kGateCell = 3;

/// Per-step activations cached by the forward pass for backpropagation.
struct LstmStepState {
  std::vector<double> f, i, o, c_tilde;  // gate outputs, entries in (0,1) / (-1,1)
  std::vector<double> c, h, tanh_c;
};

struct LstmForward {
  double probability = 0.5;
  double logit = 0.0;
  std::vector<LstmStepState> states;
};

LstmForward lstm_forward(const LstmParams& params, const FeatureSequence& sequence);

/// Exact BCE gradients w.r.t. every parameter, laid out like theta.
/// `forward` must come from lstm_forward on the same params and sequence.
std::vector<double> lstm_backward(const LstmParams& params, const FeatureSequence& sequence,
                                  const LstmForward& forward, double label);

/// Layout: W_h (hidden x hidden), W_x (hidden x input), W_out (hidden), b_out.
struct RnnParams {
  int hidden_size = 16;
  int input_size = kFeatureDims;
  std::vector<double> theta;

  RnnParams() = default;
  RnnParams(int hidden, int input);

  size_t param_count() const {
    return static_cast<size_t>(hidden_size) * hidden_size + static_cast<size_t>(hidden_size) * input_size + hidden_size + 1;
  }
  std::span<double> w_h() { return {theta.data(), static_cast<size_t>(hidden_size) * hidden_size}; }
  std::span<const double> w_h() const { return {theta.data(), static_cast<size_t>(hidden_size) * hidden_size}; }
  std::span<double> w_x() { return {theta.data() + hidden_size * hidden_size, static_cast<size_t>(hidden_size) * input_size}; }
  std::span<const double> w_x() const { return {theta.data() + hidden_size * hidden_size, static_cast<size_t>(hidden_size) * input_size}; }
  std::span<double> w_out() { return {theta.data() + hidden_size * (hidden_size + input_size), static_cast<size_t>(hidden_size)}; }
  std::span<const double> w_out() const { return {theta.data() + hidden_size * (hidden_size + input_size), static_cast<size_t>(hidden_size)}; }
  double& b_out() { return theta.back(); }
  double b_out() const { return theta.back(); }
};

struct RnnForward {
  double probability = 0.5;
  double logit = 0.0;
  std::vector<std::vector<double>> h;  // hidden state per step
};

RnnForward rnn_forward(const RnnParams& params, const FeatureSequence& sequence);
std::vector<double> rnn_backward(const RnnParams& params, const FeatureSequence& sequence,
                                 const RnnForward& forward, double label);

/// 12 -> 6 -> 6 -> 1 feed-forward net, ReLU hidden, sigmoid output.
/// Consumes full-cycle (single step) feature vectors.
/// Layout: W1 (6x12), b1, W2 (6x6), b2, W3 (6), b3.
struct FnnParams {
  static constexpr int kInput = kFeatureDims;
  static constexpr int kHidden = 6;
  std::vector<double> theta;

  FnnParams();
  size_t param_count() const { return kHidden * kInput + kHidden + kHidden * kHidden + kHidden + kHidden + 1; }
};

struct FnnForward {
  double probability = 0.5;
  double logit = 0.0;
  std::vector<double> a1, a2;  // post-ReLU activations
};

FnnForward fnn_forward(const FnnParams& params, const FeatureSequence& sequence);
std::vector<double> fnn_backward(const FnnParams& params, const FeatureSequence& sequence,
                                 const FnnForward& forward, double label);

/// Logistic regression over the 12 full-cycle features. Layout: w (12), b.
struct MlrParams {
  static constexpr int kInput = kFeatureDims;
  std::vector<double> theta;

  MlrParams();
  size_t param_count() const { return kInput + 1; }
};

struct MlrForward {
  double probability = 0.5;
  double logit = 0.0;
};

MlrForward mlr_forward(const MlrParams& params, const FeatureSequence& sequence);
std::vector<double> mlr_backward(const MlrParams& params, const FeatureSequence& sequence,
                                 const MlrForward& forward, double label);

/// Xavier-uniform weight init, zero biases, except the LSTM forget-gate bias
/// which starts at +1.
void init_params(LstmParams& params, Rng& rng);
void init_params(RnnParams& params, Rng& rng);
void init_params(FnnParams& params, Rng& rng);
void init_params(MlrParams& params, Rng& rng);

/// Norm of the loss gradient w.r.t. each step's hidden state, ordered
/// earliest step first. Exposes the per-step product structure that makes
/// plain recurrences vanish or explode. The label only scales all norms
/// together, so ratios are label-free.
std::vector<double> gradient_propagation_diagnostic(const RnnParams& params,
                                                    const FeatureSequence& sequence,
                                                    double label = 1.0);
std::vector<double> gradient_propagation_diagnostic(const LstmParams& params,
                                                    const FeatureSequence& sequence,
                                                    double label = 1.0);

/// Numerically stable binary cross-entropy from the pre-sigmoid logit.
double bce_loss_from_logit(double logit, double label);
double sigmoid(double x);

}  // namespace ccpd
