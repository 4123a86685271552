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
#include <string>
#include <string_view>
#include <vector>

#include "acls/corpus.h"
#include "acls/metrics.h"
#include "acls/model.h"
#include "acls/numerics.h"
#include "acls/training.h"

namespace acls {

// Split -> vocab (train only) -> encode -> train -> test evaluation.
struct PipelineResult {
  DatasetSplit split;
  Vocab vocab;
  Model model;
  TrainLog log;
  std::optional<MetricsReport> test;
};

PipelineResult run_pipeline(const Dataset& dataset, const TrainConfig& config,
                            const EpochCallback& on_epoch = {});

// Class probabilities per text. Texts must contain at least one token.
std::vector<std::vector<double>> predict_probs(const Model& model, const Vocab& vocab,
                                              const std::vector<std::string>& texts);

// Tiny model used by the gradient check: d=16, K=16, h=8, four classes.
TrainConfig gradcheck_config();

// Builds a model from `config` with every tensor (biases included) randomly
// initialized, runs one forward/backward on a fixed two-example batch with
// unequal lengths, and checks each tensor against central differences.
// `corrupt_group` names a tensor whose analytic grad is deliberately skewed
// before the comparison (negative control).
GradCheckReport check_model_gradients(const TrainConfig& config, const GradCheckOptions& options,
                                      std::string_view corrupt_group = {});

}  // namespace acls
