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
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acls/adversarial.h"
#include "acls/corpus.h"
#include "acls/metrics.h"
#include "acls/model.h"

namespace acls {

struct TrainConfig {
  size_t batch_size = 8;
  double learning_rate = 1e-6;  // used with a frozen, pretrained embedding table
  double scratch_lr = 1e-3;     // used when the embedding table is trained from scratch
  size_t epochs = 3;
  uint64_t seed = 24;
  size_t min_count = 1;
  FgmConfig fgm;
  size_t embed_dim = 32;
  size_t kernels = 128;
  size_t hidden = 64;
  bool use_cnn = true;
  bool use_bilstm = true;
  std::string embeddings;  // optional frozen embedding file
  SplitRatios split;

  void validate() const;
  // Learning rate actually applied for the given embedding mode.
  double effective_lr(bool embeddings_trainable) const {
    return embeddings_trainable ? scratch_lr : learning_rate;
  }
};

// Flat "key=value" lines; '#' starts a comment. Keys:
//   batch_size learning_rate scratch_lr epochs seed min_count
//   fgm.enabled fgm.epsilon
//   model.embed_dim model.kernels model.hidden model.use_cnn model.use_bilstm
//   embeddings split.train split.val split.test
// Unknown keys and unparsable values throw ConfigError.
TrainConfig parse_config(std::string_view text, TrainConfig base = {});
TrainConfig load_config(const std::filesystem::path& path, TrainConfig base = {});
// Round-trips through parse_config exactly.
std::string format_config(const TrainConfig& config);

ModelDims model_dims(const TrainConfig& config, size_t vocab_size, size_t classes);
// Loads the frozen table when config.embeddings is set.
Model make_model(const TrainConfig& config, size_t vocab_size, size_t classes);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
  uint64_t t = 0;
  std::vector<Mat> m;
  std::vector<Mat> v;
};

AdamState make_adam_state(std::span<ParamTensor* const> params);

// m = b1 m + (1-b1) g;  v = b2 v + (1-b2) g^2
// theta -= lr * m_hat / (sqrt(v_hat) + eps_hat), with bias-corrected moments.
// Gradients are left as they are.
void adam_step(std::span<ParamTensor* const> params, AdamState& state, double lr);

struct EpochRecord {
  size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  std::optional<double> adversarial_loss;
  std::optional<MetricsReport> val;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::optional<size_t> best_epoch;  // by val accuracy, earliest on ties
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Seeded shuffle per epoch, fgm_train_step (clean-only when FGM is off),
// adam_step, zero grads; val evaluation after every epoch.
TrainLog train(Model& model, const std::vector<EncodedExample>& train_set,
               const std::vector<EncodedExample>& val_set, const TrainConfig& config,
               const EpochCallback& on_epoch = {});

// Shuffle seed of a given (1-based) epoch.
uint64_t epoch_shuffle_seed(uint64_t seed, size_t epoch);

nlohmann::json train_log_to_json(const TrainLog& log, const LabelMap* labels = nullptr);

}  // namespace acls
