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

#include "acls/pipeline.h"

#include "acls/errors.h"
#include "acls/prng.h"

namespace acls {

namespace {

struct Prepared {
  DatasetSplit split;
  Vocab vocab;
};

Prepared prepare(const Dataset& dataset, const TrainConfig& config) {
  config.validate();
  Prepared p{split(dataset, config.split, config.seed), {}};
  p.vocab = build_vocab(p.split.train, config.min_count);
  return p;
}

}  // namespace

PipelineResult run_pipeline(const Dataset& dataset, const TrainConfig& config,
                            const EpochCallback& on_epoch) {
  Prepared prep = prepare(dataset, config);
  Model model = make_model(config, prep.vocab.size(), dataset.label_map.count());
  PipelineResult result{std::move(prep.split), std::move(prep.vocab), std::move(model),
                        {},
                        std::nullopt};
  const auto train_set = encode(result.split.train, result.vocab);
  const auto val_set = encode(result.split.val, result.vocab);
  result.log = train(result.model, train_set, val_set, config, on_epoch);
  if (!result.split.test.empty()) {
    result.test = evaluate(result.model, encode(result.split.test, result.vocab));
  }
  return result;
}

std::vector<std::vector<double>> predict_probs(const Model& model, const Vocab& vocab,
                                              const std::vector<std::string>& texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    std::vector<TokenId> ids;
    for (const auto& t : tokenize(text)) ids.push_back(vocab.lookup(t));
    if (ids.empty()) throw DataError("predict: text has no tokens");
    out.push_back(forward(model, embed(ids, model.embedding)).probs);
  }
  return out;
}

TrainConfig gradcheck_config() {
  TrainConfig c;
  c.embed_dim = 16;
  c.kernels = 16;
  c.hidden = 8;
  c.batch_size = 2;
  c.seed = 24;
  return c;
}

GradCheckReport check_model_gradients(const TrainConfig& config, const GradCheckOptions& options,
                                      std::string_view corrupt_group) {
  constexpr size_t kVocab = 12;
  constexpr size_t kClasses = 4;
  Model model(model_dims(config, kVocab, kClasses), config.seed);
  Prng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  for (auto* p : model.parameters()) {
    for (double& x : p->value.data()) x = rng.uniform(-0.5, 0.5);
  }
  for (double& x : model.embedding.table.value.row(Vocab::kPad)) x = 0.0;

  const std::vector<EncodedExample> examples = {
      {{2, 5, 7, 3, 11}, 1},
      {{4, 9, 2}, 3},
  };
  const Batch batch = batches(examples, examples.size()).front();

  model.zero_grads();
  auto xs = embed_batch(model, batch);
  batch_forward_backward(model, batch, xs);

  const auto params = model.parameters();
  for (auto* p : params) {
    if (p->name == corrupt_group) {
      for (double& g : p->grad.data()) g = g * 1.5 + 1e-3;
    }
  }
  auto objective = [&]() { return batch_forward_loss(model, batch, embed_batch(model, batch)); };
  return grad_check(objective, params, options);
}

}  // namespace acls
