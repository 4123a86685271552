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

#include "acls/adversarial.h"

#include <cassert>
#include <cmath>

#include "acls/errors.h"

namespace acls {

Mat fgm_delta(const Mat& g, double epsilon) {
  if (epsilon < 0) throw ConfigError("fgm epsilon must be non-negative");
  if (!g.all_finite()) throw NumericError("fgm_delta: non-finite gradient");
  Mat delta(g.rows(), g.cols());
  const double norm = l2_norm(g.data());
  if (norm < kDegenerateGradNorm || epsilon == 0.0) return delta;
  const double scale = epsilon / norm;
  for (size_t i = 0; i < g.size(); ++i) delta.data()[i] = scale * g.data()[i];
  return delta;
}

void PerturbationState::apply(std::vector<EmbeddingMatrix>& xs, const std::vector<Mat>& deltas) {
  if (active_) throw std::logic_error("PerturbationState: perturbation already outstanding");
  if (deltas.size() != xs.size()) throw ShapeError("PerturbationState: one delta per sequence");
  saved_.clear();
  saved_.reserve(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    if (!deltas[i].same_shape(xs[i].values)) {
      throw ShapeError("PerturbationState: delta " + deltas[i].shape_string() +
                       " vs embedding " + xs[i].values.shape_string());
    }
    saved_.push_back(xs[i].values);
    auto& v = xs[i].values.data();
    const auto& d = deltas[i].data();
    for (size_t j = 0; j < v.size(); ++j) v[j] += d[j];
  }
  deltas_ = deltas;
  active_ = true;
}

void PerturbationState::restore(std::vector<EmbeddingMatrix>& xs) {
  if (!active_) return;
  for (size_t i = 0; i < xs.size(); ++i) xs[i].values = std::move(saved_[i]);
  saved_.clear();
  active_ = false;
}

StepLosses fgm_train_step(Model& model, const Batch& batch, const FgmConfig& fgm) {
  auto xs = embed_batch(model, batch);
  return fgm_train_step(model, batch, fgm, xs);
}

StepLosses fgm_train_step(Model& model, const Batch& batch, const FgmConfig& fgm,
                          std::vector<EmbeddingMatrix>& xs) {
  assert(model.grads_are_zero());
  StepLosses losses;
  losses.clean = batch_forward_backward(model, batch, xs);
  if (!fgm.enabled) return losses;

  losses.deltas.reserve(xs.size());
  losses.clean_input_grads.reserve(xs.size());
  for (const auto& x : xs) {
    losses.clean_input_grads.push_back(x.grad);
    losses.deltas.push_back(fgm_delta(x.grad, fgm.epsilon));
  }

  PerturbationState state;
  state.apply(xs, losses.deltas);
  try {
    losses.adversarial = batch_forward_backward(model, batch, xs);
  } catch (...) {
    state.restore(xs);
    throw;
  }
  state.restore(xs);
  return losses;
}

}  // namespace acls
