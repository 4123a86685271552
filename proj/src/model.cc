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

#include "acls/model.h"

#include <algorithm>
#include <cmath>

#include "acls/errors.h"
#include "acls/loss.h"
#include "acls/prng.h"

namespace acls {

size_t ModelDims::fusion_width() const {
  return embed_dim + (use_cnn ? kernels : 0) + (use_bilstm ? 2 * hidden : 0);
}

void ModelDims::validate() const {
  if (!use_cnn && !use_bilstm) throw ConfigError("at most one of the CNN and BiLSTM heads may be disabled");
  if (embed_dim == 0 || kernels == 0 || hidden == 0) throw ConfigError("model dimensions must be positive");
  if (classes < 1) throw ConfigError("model needs at least one class");
  if (vocab_size < 2) throw ConfigError("vocab must hold at least PAD and UNK");
}

Model::Model(const ModelDims& dims, uint64_t seed) : dims_(dims) {
  dims_.validate();
  embedding = make_embedding_table(dims_.vocab_size, dims_.embed_dim, SplitMix64(seed).next());
  init_heads(seed);
}

Model::Model(const ModelDims& dims, EmbeddingTable table, uint64_t seed)
    : embedding(std::move(table)), dims_(dims) {
  dims_.validate();
  if (embedding.vocab_size() != dims_.vocab_size || embedding.dim() != dims_.embed_dim) {
    throw ShapeError("embedding table is " + embedding.table.value.shape_string() +
                     ", model expects " + std::to_string(dims_.vocab_size) + "x" +
                     std::to_string(dims_.embed_dim));
  }
  init_heads(seed);
}

void Model::init_heads(uint64_t seed) {
  SplitMix64 sm(seed);
  sm.next();  // embedding
  const uint64_t conv_seed = sm.next();
  const uint64_t lstm_seed = sm.next();
  const uint64_t fc_seed = sm.next();
  if (dims_.use_cnn) conv = make_conv_head(dims_.kernels, dims_.embed_dim, conv_seed);
  if (dims_.use_bilstm) lstm = make_lstm_params(dims_.embed_dim, dims_.hidden, lstm_seed);
  fc = make_fusion_classifier(dims_.fusion_width(), dims_.classes, fc_seed);
}

std::vector<ParamTensor*> Model::parameters() {
  std::vector<ParamTensor*> out{&embedding.table, &embedding.cls};
  if (dims_.use_cnn) out.push_back(&conv.kernels);
  if (dims_.use_bilstm) {
    for (auto* p : lstm.tensors()) out.push_back(p);
  }
  out.push_back(&fc.weight);
  out.push_back(&fc.bias);
  return out;
}

std::vector<const ParamTensor*> Model::parameters() const {
  auto params = const_cast<Model*>(this)->parameters();
  return {params.begin(), params.end()};
}

std::vector<ParamTensor*> Model::trainable_parameters() {
  auto params = parameters();
  if (!embedding.trainable) {
    std::erase(params, &embedding.table);
  }
  return params;
}

void Model::zero_grads() {
  for (auto* p : parameters()) p->zero_grad();
}

bool Model::grads_are_zero() const {
  for (const auto* p : parameters()) {
    for (double g : p->grad.data()) {
      if (g != 0.0) return false;
    }
  }
  return true;
}

ExampleTrace forward(const Model& model, const EmbeddingMatrix& x) {
  const ModelDims& dims = model.dims();
  ExampleTrace t;
  std::span<const double> cnn_vec, lstm_vec;
  if (dims.use_cnn) {
    t.conv = conv_forward(x, model.conv);
    cnn_vec = t.conv.pooled;
  }
  if (dims.use_bilstm) {
    t.lstm = bilstm_forward(x, model.lstm);
    lstm_vec = t.lstm.output;
  }
  t.features = concat_features(x.values.row(0), cnn_vec, lstm_vec);
  t.logits = classify(t.features, model.fc);
  t.probs = softmax(t.logits);
  return t;
}

void backward(Model& model, const ExampleTrace& trace, EmbeddingMatrix& x,
              std::span<const double> d_logits) {
  const ModelDims& dims = model.dims();
  const auto d_features = classify_backward(trace.features, d_logits, model.fc);
  std::span<const double> rest(d_features);
  auto cls_grad = x.grad.row(0);
  for (size_t j = 0; j < dims.embed_dim; ++j) cls_grad[j] += rest[j];
  rest = rest.subspan(dims.embed_dim);
  if (dims.use_cnn) {
    conv_backward(rest.subspan(0, dims.kernels), trace.conv, x, model.conv);
    rest = rest.subspan(dims.kernels);
  }
  if (dims.use_bilstm) {
    bilstm_backward(rest.subspan(0, 2 * dims.hidden), trace.lstm, x, model.lstm);
  }
}

std::vector<EmbeddingMatrix> embed_batch(const Model& model, const Batch& batch) {
  std::vector<EmbeddingMatrix> xs;
  xs.reserve(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    xs.push_back(embed(batch.row(i), batch.lengths[i], model.embedding));
  }
  return xs;
}

double batch_forward_loss(const Model& model, const Batch& batch,
                          const std::vector<EmbeddingMatrix>& xs) {
  double sum = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    sum += cross_entropy(forward(model, xs[i]).probs, batch.labels[i]);
  }
  return sum / static_cast<double>(batch.size());
}

double batch_forward_backward(Model& model, const Batch& batch, std::vector<EmbeddingMatrix>& xs) {
  const auto params = model.parameters();
  std::vector<Mat> carried;
  carried.reserve(params.size());
  for (auto* p : params) {
    carried.push_back(p->grad);
    p->zero_grad();
  }

  const double scale = 1.0 / static_cast<double>(batch.size());
  double sum = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    EmbeddingMatrix& x = xs[i];
    x.grad.fill(0.0);
    const ExampleTrace t = forward(model, x);
    sum += cross_entropy(t.probs, batch.labels[i]);
    backward(model, t, x, cross_entropy_grad(t.probs, batch.labels[i], scale));
    embed_backward(x, batch.row(i), model.embedding);
  }

  for (size_t k = 0; k < params.size(); ++k) {
    auto& g = params[k]->grad.data();
    const auto& c = carried[k].data();
    for (size_t j = 0; j < g.size(); ++j) g[j] = c[j] + g[j];
  }
  const double loss = sum / static_cast<double>(batch.size());
  if (!std::isfinite(loss)) throw NumericError("non-finite batch loss");
  return loss;
}

std::vector<std::vector<double>> model_forward(const Model& model, const Batch& batch) {
  std::vector<std::vector<double>> logits;
  logits.reserve(batch.size());
  for (const auto& x : embed_batch(model, batch)) logits.push_back(forward(model, x).logits);
  return logits;
}

size_t argmax(std::span<const double> v) {
  return static_cast<size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace acls
