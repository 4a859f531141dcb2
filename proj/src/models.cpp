#include "ccpd/models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ccpd {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Lstm: return "lstm";
    case ModelKind::Rnn: return "rnn";
    case ModelKind::Fnn: return "fnn";
    case ModelKind::Mlr: return "mlr";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "lstm") return ModelKind::Lstm;
  if (name == "rnn") return ModelKind::Rnn;
  if (name == "fnn") return ModelKind::Fnn;
  if (name == "mlr") return ModelKind::Mlr;
  throw std::invalid_argument("unknown model kind '" + name + "'");
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double bce_loss_from_logit(double logit, double label) {
  return std::max(logit, 0.0) - logit * label + std::log1p(std::exp(-std::abs(logit)));
}

LstmParams::LstmParams(int hidden, int input) : hidden_size(hidden), input_size(input) {
  if (hidden < 1 || input < 1) throw std::invalid_argument("lstm: sizes must be positive");
  theta.assign(param_count(), 0.0);
}

RnnParams::RnnParams(int hidden, int input) : hidden_size(hidden), input_size(input) {
  if (hidden < 1 || input < 1) throw std::invalid_argument("rnn: sizes must be positive");
  theta.assign(param_count(), 0.0);
}

FnnParams::FnnParams() { theta.assign(param_count(), 0.0); }

MlrParams::MlrParams() { theta.assign(param_count(), 0.0); }

namespace {

void check_sequence(const FeatureSequence& sequence, int input_size, const char* what) {
  if (sequence.steps.empty()) throw std::invalid_argument(std::string(what) + ": empty sequence");
  if (input_size != kFeatureDims)
    throw std::invalid_argument(std::string(what) + ": input size mismatch");
}

void xavier_fill(std::span<double> block, int fan_in, int fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& w : block) w = rng.uniform(-bound, bound);
}

}  // namespace

void init_params(LstmParams& params, Rng& rng) {
  for (int g = 0; g < 4; ++g)
    xavier_fill(params.w_gate(g), params.concat_size(), params.hidden_size, rng);
  xavier_fill(params.w_out(), params.hidden_size, 1, rng);
  for (int g = 0; g < 4; ++g)
    for (double& b : params.b_gate(g)) b = 0.0;
  for (double& b : params.b_gate(kGateForget)) b = 1.0;  // open the forget gate at start
  params.b_out() = 0.0;
}

void init_params(RnnParams& params, Rng& rng) {
  xavier_fill(params.w_h(), params.hidden_size, params.hidden_size, rng);
  xavier_fill(params.w_x(), params.input_size, params.hidden_size, rng);
  xavier_fill(params.w_out(), params.hidden_size, 1, rng);
  params.b_out() = 0.0;
}

void init_params(FnnParams& params, Rng& rng) {
  constexpr int in = FnnParams::kInput, h = FnnParams::kHidden;
  double* t = params.theta.data();
  xavier_fill({t, static_cast<size_t>(h * in)}, in, h, rng);
  xavier_fill({t + h * in + h, static_cast<size_t>(h * h)}, h, h, rng);
  xavier_fill({t + h * in + h + h * h + h, static_cast<size_t>(h)}, h, 1, rng);
}

void init_params(MlrParams& params, Rng& rng) {
  xavier_fill({params.theta.data(), static_cast<size_t>(MlrParams::kInput)}, MlrParams::kInput, 1,
              rng);
  params.theta.back() = 0.0;
}

// ---------------------------------------------------------------------------
// LSTM

LstmForward lstm_forward(const LstmParams& params, const FeatureSequence& sequence) {
  check_sequence(sequence, params.input_size, "lstm_forward");
  const int h = params.hidden_size;
  const int ch = params.concat_size();
  const size_t steps = sequence.steps.size();

  LstmForward out;
  out.states.resize(steps);
  std::vector<double> concat(ch);
  std::vector<double> h_prev(h, 0.0), c_prev(h, 0.0);

  for (size_t t = 0; t < steps; ++t) {
    auto& st = out.states[t];
    st.f.resize(h);
    st.i.resize(h);
    st.o.resize(h);
    st.c_tilde.resize(h);
    st.c.resize(h);
    st.h.resize(h);
    st.tanh_c.resize(h);

    for (int j = 0; j < h; ++j) concat[j] = h_prev[j];
    for (int d = 0; d < params.input_size; ++d) concat[h + d] = sequence.steps[t][d];

    for (int g = 0; g < 4; ++g) {
      const auto w = params.w_gate(g);
      const auto b = params.b_gate(g);
      for (int j = 0; j < h; ++j) {
        double a = b[j];
        const double* row = w.data() + static_cast<size_t>(j) * ch;
        for (int c = 0; c < ch; ++c) a += row[c] * concat[c];
        switch (g) {
          case kGateForget: st.f[j] = sigmoid(a); break;
          case kGateInput: st.i[j] = sigmoid(a); break;
          case kGateOutput: st.o[j] = sigmoid(a); break;
          case kGateCell: st.c_tilde[j] = std::tanh(a); break;
        }
      }
    }
    for (int j = 0; j < h; ++j) {
      st.c[j] = st.f[j] * c_prev[j] + st.i[j] * st.c_tilde[j];
      st.tanh_c[j] = std::tanh(st.c[j]);
      st.h[j] = st.o[j] * st.tanh_c[j];
    }
    h_prev = st.h;
    c_prev = st.c;
  }

  const auto w_out = params.w_out();
  double logit = params.b_out();
  for (int j = 0; j < h; ++j) logit += w_out[j] * h_prev[j];
  out.logit = logit;
  out.probability = sigmoid(logit);
  return out;
}

namespace {

// Shared BPTT core. Either output may be null: `grads` receives the full
// parameter gradient, `h_norms` the per-step ||dE/dH_t||.
void lstm_backprop(const LstmParams& params, const FeatureSequence& sequence,
                   const LstmForward& forward, double label, std::vector<double>* grads,
                   std::vector<double>* h_norms) {
  const int h = params.hidden_size;
  const int ch = params.concat_size();
  const size_t steps = sequence.steps.size();
  if (forward.states.size() != steps)
    throw std::invalid_argument("lstm_backward: cached states do not match the sequence");

  if (grads) grads->assign(params.param_count(), 0.0);
  if (h_norms) h_norms->assign(steps, 0.0);

  const double dlogit = forward.probability - label;
  const auto w_out = params.w_out();

  std::vector<double> dh(h), dc(h, 0.0);
  for (int j = 0; j < h; ++j) dh[j] = dlogit * w_out[j];

  if (grads) {
    const auto& h_last = forward.states.back().h;
    double* g_wout = grads->data() + 4 * params.gate_weights() + 4 * h;
    for (int j = 0; j < h; ++j) g_wout[j] += dlogit * h_last[j];
    grads->back() += dlogit;
  }

  std::vector<double> concat(ch), da(4 * static_cast<size_t>(h));
  for (size_t t = steps; t-- > 0;) {
    if (h_norms) {
      double ss = 0.0;
      for (int j = 0; j < h; ++j) ss += dh[j] * dh[j];
      (*h_norms)[t] = std::sqrt(ss);
    }

    const auto& st = forward.states[t];
    const std::vector<double>* h_prev = t > 0 ? &forward.states[t - 1].h : nullptr;
    const std::vector<double>* c_prev = t > 0 ? &forward.states[t - 1].c : nullptr;

    for (int j = 0; j < h; ++j) concat[j] = h_prev ? (*h_prev)[j] : 0.0;
    for (int d = 0; d < params.input_size; ++d) concat[h + d] = sequence.steps[t][d];

    for (int j = 0; j < h; ++j) {
      const double dtanh = 1.0 - st.tanh_c[j] * st.tanh_c[j];
      const double dc_j = dc[j] + dh[j] * st.o[j] * dtanh;
      const double cp = c_prev ? (*c_prev)[j] : 0.0;
      da[kGateForget * h + j] = dc_j * cp * st.f[j] * (1.0 - st.f[j]);
      da[kGateInput * h + j] = dc_j * st.c_tilde[j] * st.i[j] * (1.0 - st.i[j]);
      da[kGateOutput * h + j] = dh[j] * st.tanh_c[j] * st.o[j] * (1.0 - st.o[j]);
      da[kGateCell * h + j] = dc_j * st.i[j] * (1.0 - st.c_tilde[j] * st.c_tilde[j]);
      dc[j] = dc_j * st.f[j];  // flows to C_{t-1}
    }

    std::fill(dh.begin(), dh.end(), 0.0);
    for (int g = 0; g < 4; ++g) {
      const auto w = params.w_gate(g);
      double* gw = grads ? grads->data() + g * params.gate_weights() : nullptr;
      double* gb = grads ? grads->data() + 4 * params.gate_weights() + g * h : nullptr;
      for (int j = 0; j < h; ++j) {
        const double d = da[g * h + j];
        const double* row = w.data() + static_cast<size_t>(j) * ch;
        if (gw) {
          double* grow = gw + static_cast<size_t>(j) * ch;
          for (int c = 0; c < ch; ++c) grow[c] += d * concat[c];
          gb[j] += d;
        }
        for (int c = 0; c < h; ++c) dh[c] += row[c] * d;  // H part of W^T da
      }
    }
  }
}

}  // namespace

std::vector<double> lstm_backward(const LstmParams& params, const FeatureSequence& sequence,
                                  const LstmForward& forward, double label) {
  std::vector<double> grads;
  lstm_backprop(params, sequence, forward, label, &grads, nullptr);
  return grads;
}

std::vector<double> gradient_propagation_diagnostic(const LstmParams& params,
                                                    const FeatureSequence& sequence,
                                                    double label) {
  const LstmForward forward = lstm_forward(params, sequence);
  std::vector<double> norms;
  lstm_backprop(params, sequence, forward, label, nullptr, &norms);
  return norms;
}

// ---------------------------------------------------------------------------
// RNN

RnnForward rnn_forward(const RnnParams& params, const FeatureSequence& sequence) {
  check_sequence(sequence, params.input_size, "rnn_forward");
  const int h = params.hidden_size;
  const size_t steps = sequence.steps.size();

  RnnForward out;
  out.h.resize(steps);
  const auto w_h = params.w_h();
  const auto w_x = params.w_x();
  std::vector<double> h_prev(h, 0.0);

  for (size_t t = 0; t < steps; ++t) {
    out.h[t].resize(h);
    for (int j = 0; j < h; ++j) {
      double a = 0.0;
      const double* hrow = w_h.data() + static_cast<size_t>(j) * h;
      for (int c = 0; c < h; ++c) a += hrow[c] * h_prev[c];
      const double* xrow = w_x.data() + static_cast<size_t>(j) * params.input_size;
      for (int d = 0; d < params.input_size; ++d) a += xrow[d] * sequence.steps[t][d];
      out.h[t][j] = std::tanh(a);
    }
    h_prev = out.h[t];
  }

  const auto w_out = params.w_out();
  double logit = params.b_out();
  for (int j = 0; j < h; ++j) logit += w_out[j] * h_prev[j];
  out.logit = logit;
  out.probability = sigmoid(logit);
  return out;
}

namespace {

void rnn_backprop(const RnnParams& params, const FeatureSequence& sequence,
                  const RnnForward& forward, double label, std::vector<double>* grads,
                  std::vector<double>* h_norms) {
  const int h = params.hidden_size;
  const size_t steps = sequence.steps.size();
  if (forward.h.size() != steps)
    throw std::invalid_argument("rnn_backward: cached states do not match the sequence");

  if (grads) grads->assign(params.param_count(), 0.0);
  if (h_norms) h_norms->assign(steps, 0.0);

  const double dlogit = forward.probability - label;
  const auto w_out = params.w_out();
  const auto w_h = params.w_h();

  std::vector<double> dh(h), da(h);
  for (int j = 0; j < h; ++j) dh[j] = dlogit * w_out[j];

  if (grads) {
    double* g_wout = grads->data() + static_cast<size_t>(h) * (h + params.input_size);
    for (int j = 0; j < h; ++j) g_wout[j] += dlogit * forward.h.back()[j];
    grads->back() += dlogit;
  }

  for (size_t t = steps; t-- > 0;) {
    if (h_norms) {
      double ss = 0.0;
      for (int j = 0; j < h; ++j) ss += dh[j] * dh[j];
      (*h_norms)[t] = std::sqrt(ss);
    }
    const auto& ht = forward.h[t];
    const std::vector<double>* h_prev = t > 0 ? &forward.h[t - 1] : nullptr;
    for (int j = 0; j < h; ++j) da[j] = dh[j] * (1.0 - ht[j] * ht[j]);

    if (grads) {
      double* g_wh = grads->data();
      double* g_wx = grads->data() + static_cast<size_t>(h) * h;
      for (int j = 0; j < h; ++j) {
        if (h_prev)
          for (int c = 0; c < h; ++c) g_wh[static_cast<size_t>(j) * h + c] += da[j] * (*h_prev)[c];
        for (int d = 0; d < params.input_size; ++d)
          g_wx[static_cast<size_t>(j) * params.input_size + d] += da[j] * sequence.steps[t][d];
      }
    }
    std::fill(dh.begin(), dh.end(), 0.0);
    for (int j = 0; j < h; ++j) {
      const double* row = w_h.data() + static_cast<size_t>(j) * h;
      for (int c = 0; c < h; ++c) dh[c] += row[c] * da[j];
    }
  }
}

}  // namespace

std::vector<double> rnn_backward(const RnnParams& params, const FeatureSequence& sequence,
                                 const RnnForward& forward, double label) {
  std::vector<double> grads;
  rnn_backprop(params, sequence, forward, label, &grads, nullptr);
  return grads;
}

std::vector<double> gradient_propagation_diagnostic(const RnnParams& params,
                                                    const FeatureSequence& sequence,
                                                    double label) {
  const RnnForward forward = rnn_forward(params, sequence);
  std::vector<double> norms;
  rnn_backprop(params, sequence, forward, label, nullptr, &norms);
  return norms;
}

// ---------------------------------------------------------------------------
// FNN (12 -> 6 -> 6 -> 1)

FnnForward fnn_forward(const FnnParams& params, const FeatureSequence& sequence) {
  check_sequence(sequence, FnnParams::kInput, "fnn_forward");
  if (sequence.steps.size() != 1)
    throw std::invalid_argument("fnn_forward: expects full-cycle features (one step)");
  constexpr int in = FnnParams::kInput, h = FnnParams::kHidden;
  const auto& x = sequence.steps[0];
  const double* t = params.theta.data();
  const double* w1 = t;
  const double* b1 = t + h * in;
  const double* w2 = b1 + h;
  const double* b2 = w2 + h * h;
  const double* w3 = b2 + h;
  const double b3 = *(w3 + h);

  FnnForward out;
  out.a1.resize(h);
  out.a2.resize(h);
  for (int j = 0; j < h; ++j) {
    double a = b1[j];
    for (int d = 0; d < in; ++d) a += w1[j * in + d] * x[d];
    out.a1[j] = std::max(a, 0.0);
  }
  for (int j = 0; j < h; ++j) {
    double a = b2[j];
    for (int c = 0; c < h; ++c) a += w2[j * h + c] * out.a1[c];
    out.a2[j] = std::max(a, 0.0);
  }
  double logit = b3;
  for (int j = 0; j < h; ++j) logit += w3[j] * out.a2[j];
  out.logit = logit;
  out.probability = sigmoid(logit);
  return out;
}

std::vector<double> fnn_backward(const FnnParams& params, const FeatureSequence& sequence,
                                 const FnnForward& forward, double label) {
  constexpr int in = FnnParams::kInput, h = FnnParams::kHidden;
  const auto& x = sequence.steps[0];
  const double* t = params.theta.data();
  const double* w2 = t + h * in + h;
  const double* w3 = w2 + h * h + h;

  std::vector<double> grads(params.param_count(), 0.0);
  double* g_w1 = grads.data();
  double* g_b1 = g_w1 + h * in;
  double* g_w2 = g_b1 + h;
  double* g_b2 = g_w2 + h * h;
  double* g_w3 = g_b2 + h;
  double* g_b3 = g_w3 + h;

  const double dlogit = forward.probability - label;
  *g_b3 = dlogit;
  std::vector<double> dz2(h), dz1(h);
  for (int j = 0; j < h; ++j) {
    g_w3[j] = dlogit * forward.a2[j];
    dz2[j] = forward.a2[j] > 0.0 ? dlogit * w3[j] : 0.0;
  }
  for (int j = 0; j < h; ++j) {
    g_b2[j] = dz2[j];
    for (int c = 0; c < h; ++c) g_w2[j * h + c] = dz2[j] * forward.a1[c];
  }
  for (int c = 0; c < h; ++c) {
    double da = 0.0;
    for (int j = 0; j < h; ++j) da += w2[j * h + c] * dz2[j];
    dz1[c] = forward.a1[c] > 0.0 ? da : 0.0;
  }
  for (int j = 0; j < h; ++j) {
    g_b1[j] = dz1[j];
    for (int d = 0; d < in; ++d) g_w1[j * in + d] = dz1[j] * x[d];
  }
  return grads;
}

// ---------------------------------------------------------------------------
// MLR

MlrForward mlr_forward(const MlrParams& params, const FeatureSequence& sequence) {
  check_sequence(sequence, MlrParams::kInput, "mlr_forward");
  if (sequence.steps.size() != 1)
    throw std::invalid_argument("mlr_forward: expects full-cycle features (one step)");
  const auto& x = sequence.steps[0];
  double logit = params.theta.back();
  for (int d = 0; d < MlrParams::kInput; ++d) logit += params.theta[d] * x[d];
  return {sigmoid(logit), logit};
}

std::vector<double> mlr_backward(const MlrParams& params, const FeatureSequence& sequence,
                                 const MlrForward& forward, double label) {
  (void)params;
  const auto& x = sequence.steps[0];
  std::vector<double> grads(MlrParams::kInput + 1);
  const double dlogit = forward.probability - label;
  for (int d = 0; d < MlrParams::kInput; ++d) grads[d] = dlogit * x[d];
  grads.back() = dlogit;
  return grads;
}

}  // namespace ccpd
