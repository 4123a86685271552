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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "acls/embedding.h"
#include "acls/numerics.h"

namespace acls {

// ---------------------------------------------------------------------------
// Convolution head. Kernel size 1, stride 1, no padding, no bias:
//
//   Y_k[i] = sum_j X[i, j] * W[k, j]
//
// followed by max-over-time pooling across the valid rows (CLS included).
// ---------------------------------------------------------------------------

struct ConvHead {
  ParamTensor kernels;  // K x d

  size_t num_kernels() const { return kernels.value.rows(); }
};

ConvHead make_conv_head(size_t num_kernels, size_t dim, uint64_t seed);

struct ConvTrace {
  Mat feature_map;              // length x K
  std::vector<double> pooled;   // K
  std::vector<size_t> argmax;   // K, first maximal row wins ties
};

ConvTrace conv_forward(const EmbeddingMatrix& x, const ConvHead& head);

// Routes d_pooled to each kernel's argmax row, then applies the adjoint of the
// per-position projection. Accumulates into x.grad and head.kernels.grad.
void conv_backward(std::span<const double> d_pooled, const ConvTrace& trace,
                   EmbeddingMatrix& x, ConvHead& head);

// ---------------------------------------------------------------------------
// LSTM
// ---------------------------------------------------------------------------

enum Gate : size_t { kInputGate = 0, kForgetGate = 1, kOutputGate = 2, kCandidate = 3 };
inline constexpr size_t kNumGates = 4;

struct LstmDirection {
  std::array<ParamTensor, kNumGates> w;  // h x d, input weights
  std::array<ParamTensor, kNumGates> u;  // h x h, recurrent weights
  std::array<ParamTensor, kNumGates> b;  // h x 1

  size_t hidden() const { return u[0].value.rows(); }
  size_t input_dim() const { return w[0].value.cols(); }
  std::vector<ParamTensor*> tensors();
};

struct LstmParams {
  LstmDirection forward;
  LstmDirection backward;

  size_t hidden() const { return forward.hidden(); }
  std::vector<ParamTensor*> tensors();
};

// `prefix` is "lstm.fwd" or "lstm.bwd"; tensors are named "<prefix>.W_i" etc.
LstmDirection make_lstm_direction(const std::string& prefix, size_t dim, size_t hidden,
                                  uint64_t seed);
LstmParams make_lstm_params(size_t dim, size_t hidden, uint64_t seed);

// Activations of one cell evaluation, kept for the backward pass.
struct LstmStep {
  std::vector<double> h_prev, c_prev;
  std::array<std::vector<double>, kNumGates> gate;  // post-nonlinearity
  std::vector<double> c, tanh_c, h;
};

// i, f, o = sigmoid(W x + U h_prev + b); g = tanh(...)
// c = f * c_prev + i * g;  h = o * tanh(c)
LstmStep lstm_cell(std::span<const double> x, std::span<const double> h_prev,
                   std::span<const double> c_prev, const LstmDirection& params);

// Given dL/dh and dL/dc of this step, accumulates parameter grads, adds into
// dx, and overwrites dh_prev / dc_prev.
void lstm_cell_backward(const LstmStep& step, std::span<const double> x,
                        std::span<const double> dh, std::span<const double> dc,
                        LstmDirection& params, std::span<double> dx,
                        std::vector<double>& dh_prev, std::vector<double>& dc_prev);

struct BiLstmTrace {
  std::vector<LstmStep> forward;   // over rows 1 .. length-1
  std::vector<LstmStep> backward;  // over rows length-1 .. 1
  std::vector<double> output;      // [h_forward_final, h_backward_final]
};

// Runs over the token rows only (the CLS row and padding are skipped).
// Throws ShapeError if the sequence has no tokens.
BiLstmTrace bilstm_forward(const EmbeddingMatrix& x, const LstmParams& params);

void bilstm_backward(std::span<const double> d_output, const BiLstmTrace& trace,
                     EmbeddingMatrix& x, LstmParams& params);

// ---------------------------------------------------------------------------
// Fusion classifier: logits = W [cls; cnn; lstm] + b
// ---------------------------------------------------------------------------

struct FusionClassifier {
  ParamTensor weight;  // C x in
  ParamTensor bias;    // C x 1

  size_t classes() const { return weight.value.rows(); }
  size_t input_width() const { return weight.value.cols(); }
};

FusionClassifier make_fusion_classifier(size_t input_width, size_t classes, uint64_t seed);

std::vector<double> concat_features(std::span<const double> cls_vec,
                                    std::span<const double> cnn_vec,
                                    std::span<const double> lstm_vec);

std::vector<double> classify(std::span<const double> features, const FusionClassifier& fc);

std::vector<double> fuse_and_classify(std::span<const double> cls_vec,
                                      std::span<const double> cnn_vec,
                                      std::span<const double> lstm_vec,
                                      const FusionClassifier& fc);

// Accumulates fc grads and returns dL/dfeatures.
std::vector<double> classify_backward(std::span<const double> features,
                                      std::span<const double> d_logits, FusionClassifier& fc);

}  // namespace acls
