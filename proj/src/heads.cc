// Copyright 2026 The acls Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "acls/heads.h"

#include <cmath>

#include "acls/errors.h"

namespace acls {

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

constexpr std::array<const char*, kNumGates> kGateSuffix = {"i", "f", "o", "g"};

}  // namespace

ConvHead make_conv_head(size_t num_kernels, size_t dim, uint64_t seed) {
  if (num_kernels == 0) throw ConfigError("conv head needs at least one kernel");
  return ConvHead{ParamTensor("conv.kernels",
                              init_params(num_kernels, dim, seed, InitScheme::kUniformScaled))};
}

ConvTrace conv_forward(const EmbeddingMatrix& x, const ConvHead& head) {
  const Mat& w = head.kernels.value;
  const size_t d = x.values.cols();
  if (w.cols() != d) {
    throw ShapeError("conv_forward: kernel width " + std::to_string(w.cols()) +
                     " != embedding width " + std::to_string(d));
  }
  const size_t k_count = w.rows();
  ConvTrace t;
  t.feature_map = Mat(x.length, k_count);
  for (size_t i = 0; i < x.length; ++i) {
    const auto xi = x.values.row(i);
    auto yi = t.feature_map.row(i);
    for (size_t k = 0; k < k_count; ++k) {
      const auto wk = w.row(k);
      double acc = 0.0;
      for (size_t j = 0; j < d; ++j) acc += xi[j] * wk[j];
      yi[k] = acc;
    }
  }
  t.pooled.assign(k_count, 0.0);
  t.argmax.assign(k_count, 0);
  if (x.length == 0) return t;
  for (size_t k = 0; k < k_count; ++k) {
    size_t best = 0;
    for (size_t i = 1; i < x.length; ++i) {
      if (t.feature_map(i, k) > t.feature_map(best, k)) best = i;
    }
    t.argmax[k] = best;
    t.pooled[k] = t.feature_map(best, k);
  }
  return t;
}

void conv_backward(std::span<const double> d_pooled, const ConvTrace& trace, EmbeddingMatrix& x,
                   ConvHead& head) {
  const Mat& w = head.kernels.value;
  Mat& dw = head.kernels.grad;
  const size_t d = w.cols();
  for (size_t k = 0; k < w.rows(); ++k) {
    const double g = d_pooled[k];
    if (g == 0.0) continue;
    const size_t i = trace.argmax[k];
    const auto xi = x.values.row(i);
    auto dxi = x.grad.row(i);
    const auto wk = w.row(k);
    auto dwk = dw.row(k);
    for (size_t j = 0; j < d; ++j) {
      dxi[j] += g * wk[j];
      dwk[j] += g * xi[j];
    }
  }
}

std::vector<ParamTensor*> LstmDirection::tensors() {
  std::vector<ParamTensor*> out;
  for (size_t g = 0; g < kNumGates; ++g) {
    out.push_back(&w[g]);
    out.push_back(&u[g]);
    out.push_back(&b[g]);
  }
  return out;
}

std::vector<ParamTensor*> LstmParams::tensors() {
  auto out = forward.tensors();
  for (auto* p : backward.tensors()) out.push_back(p);
  return out;
}

LstmDirection make_lstm_direction(const std::string& prefix, size_t dim, size_t hidden,
                                  uint64_t seed) {
  if (hidden == 0) throw ConfigError("lstm hidden size must be positive");
  LstmDirection dir;
  for (size_t g = 0; g < kNumGates; ++g) {
    const std::string s = kGateSuffix[g];
    dir.w[g] = ParamTensor(prefix + ".W_" + s,
                           init_params(hidden, dim, seed + 2 * g, InitScheme::kUniformScaled));
    dir.u[g] = ParamTensor(prefix + ".U_" + s, init_params(hidden, hidden, seed + 2 * g + 1,
                                                           InitScheme::kUniformScaled));
    dir.b[g] = ParamTensor(prefix + ".b_" + s, init_params(hidden, 1, 0, InitScheme::kZeros));
  }
  return dir;
}

LstmParams make_lstm_params(size_t dim, size_t hidden, uint64_t seed) {
  return LstmParams{make_lstm_direction("lstm.fwd", dim, hidden, seed),
                    make_lstm_direction("lstm.bwd", dim, hidden, seed + 100)};
}

LstmStep lstm_cell(std::span<const double> x, std::span<const double> h_prev,
                   std::span<const double> c_prev, const LstmDirection& params) {
  const size_t h = params.hidden();
  const size_t d = params.input_dim();
  if (x.size() != d || h_prev.size() != h || c_prev.size() != h) {
    throw ShapeError("lstm_cell: input/state sizes do not match parameters");
  }
  LstmStep s;
  s.h_prev.assign(h_prev.begin(), h_prev.end());
  s.c_prev.assign(c_prev.begin(), c_prev.end());
  for (size_t g = 0; g < kNumGates; ++g) {
    const Mat& w = params.w[g].value;
    const Mat& u = params.u[g].value;
    const auto& b = params.b[g].value.data();
    auto& out = s.gate[g];
    out.resize(h);
    for (size_t r = 0; r < h; ++r) {
      double a = b[r];
      const auto wr = w.row(r);
      for (size_t j = 0; j < d; ++j) a += wr[j] * x[j];
      const auto ur = u.row(r);
      for (size_t j = 0; j < h; ++j) a += ur[j] * h_prev[j];
      out[r] = g == kCandidate ? std::tanh(a) : sigmoid(a);
    }
  }
  s.c.resize(h);
  s.tanh_c.resize(h);
  s.h.resize(h);
  for (size_t r = 0; r < h; ++r) {
    s.c[r] = s.gate[kForgetGate][r] * c_prev[r] + s.gate[kInputGate][r] * s.gate[kCandidate][r];
    s.tanh_c[r] = std::tanh(s.c[r]);
    s.h[r] = s.gate[kOutputGate][r] * s.tanh_c[r];
  }
  return s;
}

void lstm_cell_backward(const LstmStep& step, std::span<const double> x,
                        std::span<const double> dh, std::span<const double> dc,
                        LstmDirection& params, std::span<double> dx,
                        std::vector<double>& dh_prev, std::vector<double>& dc_prev) {
  const size_t h = params.hidden();
  const size_t d = params.input_dim();
  const auto& gi = step.gate[kInputGate];
  const auto& gf = step.gate[kForgetGate];
  const auto& go = step.gate[kOutputGate];
  const auto& gg = step.gate[kCandidate];

  // Pre-activation gradients per gate.
  std::array<std::vector<double>, kNumGates> da;
  for (auto& v : da) v.resize(h);
  dc_prev.assign(h, 0.0);
  for (size_t r = 0; r < h; ++r) {
    const double tc = step.tanh_c[r];
    const double dc_total = dc[r] + dh[r] * go[r] * (1.0 - tc * tc);
    da[kOutputGate][r] = dh[r] * tc * go[r] * (1.0 - go[r]);
    da[kInputGate][r] = dc_total * gg[r] * gi[r] * (1.0 - gi[r]);
    da[kForgetGate][r] = dc_total * step.c_prev[r] * gf[r] * (1.0 - gf[r]);
    da[kCandidate][r] = dc_total * gi[r] * (1.0 - gg[r] * gg[r]);
    dc_prev[r] = dc_total * gf[r];
  }

  dh_prev.assign(h, 0.0);
  for (size_t g = 0; g < kNumGates; ++g) {
    const Mat& w = params.w[g].value;
    const Mat& u = params.u[g].value;
    Mat& dw = params.w[g].grad;
    Mat& du = params.u[g].grad;
    auto& db = params.b[g].grad.data();
    for (size_t r = 0; r < h; ++r) {
      const double a = da[g][r];
      if (a == 0.0) continue;
      db[r] += a;
      const auto wr = w.row(r);
      auto dwr = dw.row(r);
      for (size_t j = 0; j < d; ++j) {
        dwr[j] += a * x[j];
        dx[j] += a * wr[j];
      }
      const auto ur = u.row(r);
      auto dur = du.row(r);
      for (size_t j = 0; j < h; ++j) {
        dur[j] += a * step.h_prev[j];
        dh_prev[j] += a * ur[j];
      }
    }
  }
}

BiLstmTrace bilstm_forward(const EmbeddingMatrix& x, const LstmParams& params) {
  if (x.length < 2) throw ShapeError("bilstm_forward: sequence has no tokens");
  const size_t h = params.hidden();
  const size_t last = x.length - 1;
  BiLstmTrace t;
  t.forward.reserve(last);
  t.backward.reserve(last);

  std::vector<double> h_state(h, 0.0), c_state(h, 0.0);
  for (size_t row = 1; row <= last; ++row) {
    t.forward.push_back(lstm_cell(x.values.row(row), h_state, c_state, params.forward));
    h_state = t.forward.back().h;
    c_state = t.forward.back().c;
  }
  t.output = h_state;

  h_state.assign(h, 0.0);
  c_state.assign(h, 0.0);
  for (size_t row = last; row >= 1; --row) {
    t.backward.push_back(lstm_cell(x.values.row(row), h_state, c_state, params.backward));
    h_state = t.backward.back().h;
    c_state = t.backward.back().c;
  }
  t.output.insert(t.output.end(), h_state.begin(), h_state.end());
  return t;
}

namespace {

// `rows[s]` is the embedding row consumed at step s.
void direction_backward(std::span<const double> d_final, const std::vector<LstmStep>& steps,
                        const std::vector<size_t>& rows, EmbeddingMatrix& x,
                        LstmDirection& params) {
  const size_t h = params.hidden();
  std::vector<double> dh(d_final.begin(), d_final.end());
  std::vector<double> dc(h, 0.0);
  std::vector<double> dh_prev, dc_prev;
  for (size_t s = steps.size(); s-- > 0;) {
    const size_t row = rows[s];
    lstm_cell_backward(steps[s], x.values.row(row), dh, dc, params, x.grad.row(row), dh_prev,
                       dc_prev);
    dh.swap(dh_prev);
    dc.swap(dc_prev);
  }
}

}  // namespace

void bilstm_backward(std::span<const double> d_output, const BiLstmTrace& trace,
                     EmbeddingMatrix& x, LstmParams& params) {
  const size_t h = params.hidden();
  const size_t n = trace.forward.size();
  std::vector<size_t> rows(n);
  for (size_t s = 0; s < n; ++s) rows[s] = s + 1;
  direction_backward(d_output.subspan(0, h), trace.forward, rows, x, params.forward);
  for (size_t s = 0; s < n; ++s) rows[s] = n - s;
  direction_backward(d_output.subspan(h, h), trace.backward, rows, x, params.backward);
}

FusionClassifier make_fusion_classifier(size_t input_width, size_t classes, uint64_t seed) {
  return FusionClassifier{
      ParamTensor("fc.weight",
                  init_params(classes, input_width, seed, InitScheme::kUniformScaled)),
      ParamTensor("fc.bias", init_params(classes, 1, 0, InitScheme::kZeros))};
}

std::vector<double> concat_features(std::span<const double> cls_vec,
                                    std::span<const double> cnn_vec,
                                    std::span<const double> lstm_vec) {
  std::vector<double> z;
  z.reserve(cls_vec.size() + cnn_vec.size() + lstm_vec.size());
  z.insert(z.end(), cls_vec.begin(), cls_vec.end());
  z.insert(z.end(), cnn_vec.begin(), cnn_vec.end());
  z.insert(z.end(), lstm_vec.begin(), lstm_vec.end());
  return z;
}

std::vector<double> classify(std::span<const double> features, const FusionClassifier& fc) {
  if (features.size() != fc.input_width()) {
    throw ShapeError("classifier: feature width " + std::to_string(features.size()) +
                     " != fc input width " + std::to_string(fc.input_width()));
  }
  const Mat& w = fc.weight.value;
  const auto& b = fc.bias.value.data();
  std::vector<double> logits(fc.classes());
  for (size_t c = 0; c < logits.size(); ++c) {
    double acc = b[c];
    const auto wc = w.row(c);
    for (size_t j = 0; j < features.size(); ++j) acc += wc[j] * features[j];
    logits[c] = acc;
  }
  return logits;
}

std::vector<double> fuse_and_classify(std::span<const double> cls_vec,
                                      std::span<const double> cnn_vec,
                                      std::span<const double> lstm_vec,
                                      const FusionClassifier& fc) {
  return classify(concat_features(cls_vec, cnn_vec, lstm_vec), fc);
}

std::vector<double> classify_backward(std::span<const double> features,
                                      std::span<const double> d_logits, FusionClassifier& fc) {
  const Mat& w = fc.weight.value;
  Mat& dw = fc.weight.grad;
  auto& db = fc.bias.grad.data();
  std::vector<double> d_features(features.size(), 0.0);
  for (size_t c = 0; c < d_logits.size(); ++c) {
    const double g = d_logits[c];
    db[c] += g;
    const auto wc = w.row(c);
    auto dwc = dw.row(c);
    for (size_t j = 0; j < features.size(); ++j) {
      dwc[j] += g * features[j];
      d_features[j] += g * wc[j];
    }
  }
  return d_features;
}

}  // namespace acls
