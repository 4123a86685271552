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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "acls/corpus.h"
#include "acls/embedding.h"
#include "acls/heads.h"

namespace acls {

struct ModelDims {
  size_t vocab_size = 2;
  size_t embed_dim = 32;
  size_t kernels = 128;
  size_t hidden = 64;
  size_t classes = 2;
  bool use_cnn = true;
  bool use_bilstm = true;

  // d + K + 2h, minus whichever head is disabled.
  size_t fusion_width() const;
  void validate() const;
};

// Embedding, the two parallel heads and the fusion classifier. A disabled
// head holds no tensors.
class Model {
 public:
  Model(const ModelDims& dims, uint64_t seed);
  // Uses a caller-supplied (typically frozen) embedding table.
  Model(const ModelDims& dims, EmbeddingTable embedding, uint64_t seed);

  const ModelDims& dims() const { return dims_; }

  EmbeddingTable embedding;
  ConvHead conv;
  LstmParams lstm;
  FusionClassifier fc;

  // Fixed order: embedding, conv, lstm forward/backward, fc.
  std::vector<ParamTensor*> parameters();
  std::vector<const ParamTensor*> parameters() const;
  // parameters() minus the frozen embedding table.
  std::vector<ParamTensor*> trainable_parameters();
  void zero_grads();
  bool grads_are_zero() const;

 private:
  void init_heads(uint64_t seed);

  ModelDims dims_;
};

struct ExampleTrace {
  ConvTrace conv;
  BiLstmTrace lstm;
  std::vector<double> features;
  std::vector<double> logits;
  std::vector<double> probs;
};

ExampleTrace forward(const Model& model, const EmbeddingMatrix& x);

// Accumulates parameter grads and x.grad from dL/dlogits. Does not touch the
// embedding table; see embed_backward.
void backward(Model& model, const ExampleTrace& trace, EmbeddingMatrix& x,
              std::span<const double> d_logits);

std::vector<EmbeddingMatrix> embed_batch(const Model& model, const Batch& batch);

// Mean cross-entropy of the batch given its (possibly perturbed) embeddings.
double batch_forward_loss(const Model& model, const Batch& batch,
                          const std::vector<EmbeddingMatrix>& xs);

// One forward + backward pass. Each x.grad is overwritten with dL/dx of the
// mean batch loss. Parameter gradients of the pass are computed on their own
// and then added to whatever the parameters already hold.
double batch_forward_backward(Model& model, const Batch& batch, std::vector<EmbeddingMatrix>& xs);

// Logits, one row per example.
std::vector<std::vector<double>> model_forward(const Model& model, const Batch& batch);

// Index of the largest entry; first index wins ties.
size_t argmax(std::span<const double> v);

}  // namespace acls
