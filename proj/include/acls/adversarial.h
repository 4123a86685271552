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

#include <optional>
#include <vector>

#include "acls/corpus.h"
#include "acls/embedding.h"
#include "acls/model.h"
#include "acls/numerics.h"

namespace acls {

struct FgmConfig {
  double epsilon = 1.0;
  bool enabled = true;
};

// Norms below this are treated as a flat point and produce no perturbation.
inline constexpr double kDegenerateGradNorm = 1e-12;

// epsilon * g / ||g||_2, with the Frobenius norm taken over the whole matrix.
Mat fgm_delta(const Mat& g, double epsilon);

// Saves embedding values before a perturbation is added and puts them back
// bit-for-bit. Only one perturbation may be outstanding.
class PerturbationState {
 public:
  void apply(std::vector<EmbeddingMatrix>& xs, const std::vector<Mat>& deltas);
  void restore(std::vector<EmbeddingMatrix>& xs);
  bool active() const { return active_; }
  const std::vector<Mat>& deltas() const { return deltas_; }

 private:
  std::vector<Mat> saved_;
  std::vector<Mat> deltas_;
  bool active_ = false;
};

struct StepLosses {
  double clean = 0.0;
  std::optional<double> adversarial;
  // Per example: dL/dX from the clean pass and the delta that was applied.
  std::vector<Mat> clean_input_grads;
  std::vector<Mat> deltas;
};

// One adversarial training step on a batch. Expects zeroed gradients.
//   1. forward/backward on the clean embeddings; keep g = dL/dX per example
//   2. X += fgm_delta(g, epsilon)
//   3. forward/backward on the perturbed embeddings, adding to the grads
//   4. restore X
// With fgm.enabled == false only step 1 runs. The optimizer step is the
// caller's job.
StepLosses fgm_train_step(Model& model, const Batch& batch, const FgmConfig& fgm);

// Same, on embeddings the caller already built with embed_batch. On return
// xs hold their original values and the grads of the last pass.
StepLosses fgm_train_step(Model& model, const Batch& batch, const FgmConfig& fgm,
                          std::vector<EmbeddingMatrix>& xs);

}  // namespace acls
