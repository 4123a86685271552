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

#include "acls/training.h"

#include <gtest/gtest.h>

#include <cmath>

#include "acls/errors.h"
#include "acls/loss.h"
#include "acls/pipeline.h"
#include "acls/synth.h"
#include "test_util.h"

namespace acls {
namespace {

using testing::bit_equal;
using testing::random_mat;

// ---- loss --------------------------------------------------------------------

TEST(CrossEntropyTest, ConfidentAndUniform) {
  EXPECT_EQ(cross_entropy(std::vector<double>{0.0, 1.0, 0.0}, 1), 0.0);
  const std::vector<double> uniform(14, 1.0 / 14.0);
  EXPECT_NEAR(cross_entropy(uniform, 5), std::log(14.0), 1e-12);
  EXPECT_NEAR(std::log(14.0), 2.6391, 1e-4);
}

TEST(CrossEntropyTest, ClampsZeroProbability) {
  EXPECT_NEAR(cross_entropy(std::vector<double>{1.0, 0.0}, 1), -std::log(kProbFloor), 1e-12);
}

TEST(CrossEntropyTest, InvalidLabel) {
  const std::vector<double> p = {0.5, 0.5};
  EXPECT_THROW(cross_entropy(p, 2), DataError);
  EXPECT_THROW(cross_entropy(p, -1), DataError);
}

TEST(CrossEntropyTest, BatchMatchesLoopOracle) {
  Prng rng(1);
  for (int t = 0; t < 20; ++t) {
    std::vector<std::vector<double>> probs;
    std::vector<ClassId> labels;
    std::vector<int> ilabels;
    for (int i = 0; i < 4; ++i) {
      std::vector<double> z(6);
      for (auto& v : z) v = rng.uniform(-3, 3);
      probs.push_back(oracle::naive_softmax(z));
      labels.push_back(static_cast<ClassId>(rng.uniform_index(6)));
      ilabels.push_back(labels.back());
    }
    EXPECT_NEAR(batch_loss(probs, labels), oracle::naive_mean_ce(probs, ilabels), 1e-12);
  }
}

TEST(CrossEntropyTest, GradientMatchesFiniteDifference) {
  Prng rng(2);
  std::vector<double> z(5);
  for (auto& v : z) v = rng.uniform(-2, 2);
  const auto g = cross_entropy_grad(softmax(z), 3, 1.0);
  for (size_t k = 0; k < z.size(); ++k) {
    auto zp = z, zm = z;
    zp[k] += 1e-5;
    zm[k] -= 1e-5;
    const double num = (cross_entropy(softmax(zp), 3) - cross_entropy(softmax(zm), 3)) / 2e-5;
    EXPECT_NEAR(g[k], num, 1e-8);
  }
}

// ---- Adam --------------------------------------------------------------------

TEST(AdamTest, FirstStepMovesByLearningRate) {
  ParamTensor p("theta", Mat(1, 1, 1.5));
  p.grad(0, 0) = 2.0;
  ParamTensor* ps[] = {&p};
  auto st = make_adam_state(ps);
  adam_step(ps, st, 0.1);
  EXPECT_NEAR(p.value(0, 0), 1.5 - 0.1, 1e-8);
  EXPECT_EQ(st.t, 1u);
  EXPECT_EQ(p.grad(0, 0), 2.0);
}

TEST(AdamTest, ZeroGradLeavesParameter) {
  ParamTensor p("theta", Mat(2, 2, 0.25));
  ParamTensor* ps[] = {&p};
  auto st = make_adam_state(ps);
  adam_step(ps, st, 0.1);
  EXPECT_EQ(p.value, Mat(2, 2, 0.25));
}

TEST(AdamTest, MatchesReferenceRecurrence) {
  Prng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    ParamTensor p("theta", Mat(1, 1, rng.uniform(-1, 1)));
    ParamTensor* ps[] = {&p};
    auto st = make_adam_state(ps);
    double theta = p.value(0, 0), m = 0, v = 0;
    const double lr = 0.01;
    for (int t = 1; t <= 3; ++t) {
      const double g = rng.uniform(-2, 2);
      p.grad(0, 0) = g;
      adam_step(ps, st, lr);
      m = 0.9 * m + 0.1 * g;
      v = 0.999 * v + 0.001 * g * g;
      const double mh = m / (1 - std::pow(0.9, t));
      const double vh = v / (1 - std::pow(0.999, t));
      theta -= lr * mh / (std::sqrt(vh) + 1e-8);
      EXPECT_NEAR(p.value(0, 0), theta, 1e-12);
    }
  }
}

TEST(AdamTest, StepSizeStaysNearLearningRate) {
  Prng rng(4);
  ParamTensor p("theta", random_mat(4, 5, rng));
  ParamTensor* ps[] = {&p};
  auto st = make_adam_state(ps);
  const double lr = 1e-3;
  for (int t = 0; t < 200; ++t) {
    p.grad = random_mat(4, 5, rng, std::exp(rng.uniform(-5, 5)));
    const Mat before = p.value;
    adam_step(ps, st, lr);
    if (t == 0) continue;
    for (size_t i = 0; i < before.size(); ++i)
      ASSERT_LE(std::abs(p.value.data()[i] - before.data()[i]), 2 * lr);
  }
}

TEST(AdamTest, RejectsNonFiniteAndMismatchedState) {
  ParamTensor p("theta", Mat(1, 2));
  ParamTensor* ps[] = {&p};
  auto st = make_adam_state(ps);
  p.grad(0, 1) = INFINITY;
  EXPECT_THROW(adam_step(ps, st, 0.1), NumericError);
  ParamTensor q("q", Mat(3, 1));
  ParamTensor* qs[] = {&q};
  EXPECT_THROW(adam_step(qs, st, 0.1), ShapeError);
}

TEST(AdamTest, RepeatedStepsOnOneBatchDoNotRaiseLoss) {
  ModelDims d;
  d.vocab_size = 20;
  d.embed_dim = 8;
  d.kernels = 6;
  d.hidden = 4;
  d.classes = 3;
  Model m(d, 11);
  const std::vector<EncodedExample> ex = {{{2, 5, 7, 3}, 0}, {{4, 9}, 2}, {{13, 6, 19}, 1}};
  const Batch b = batches(ex, 3)[0];
  auto params = m.trainable_parameters();
  auto st = make_adam_state(params);
  double prev = INFINITY;
  for (int rep = 0; rep < 10; ++rep) {
    auto xs = embed_batch(m, b);
    const double loss = batch_forward_backward(m, b, xs);
    EXPECT_LE(loss, prev + 1e-9) << rep;
    prev = loss;
    adam_step(params, st, 1e-4);
    m.zero_grads();
  }
}

// ---- config ------------------------------------------------------------------

TEST(TrainConfigTest, ValidationRejectsBadValues) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.epochs = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.learning_rate = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.fgm.epsilon = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(parse_config("epochs=0\n").validate(), ConfigError);
}

TEST(TrainConfigTest, DefaultsAndEffectiveRate) {
  const TrainConfig c;
  EXPECT_EQ(c.batch_size, 8u);
  EXPECT_EQ(c.learning_rate, 1e-6);
  EXPECT_EQ(c.epochs, 3u);
  EXPECT_EQ(c.seed, 24u);
  EXPECT_EQ(c.fgm.epsilon, 1.0);
  EXPECT_EQ(c.effective_lr(true), 1e-3);
  EXPECT_EQ(c.effective_lr(false), 1e-6);
}

TEST(TrainConfigTest, ParseAndFormatRoundTrip) {
  const auto c = parse_config(
      "# comment\n"
      "batch_size = 4\n"
      "learning_rate=2.5e-5\n"
      "fgm.enabled=false\n"
      "fgm.epsilon=0.3\n"
      "model.hidden=16\n"
      "model.use_cnn=false\n"
      "split.train=0.7\nsplit.val=0.2\nsplit.test=0.1\n");
  EXPECT_EQ(c.batch_size, 4u);
  EXPECT_EQ(c.learning_rate, 2.5e-5);
  EXPECT_FALSE(c.fgm.enabled);
  EXPECT_EQ(c.fgm.epsilon, 0.3);
  EXPECT_EQ(c.hidden, 16u);
  EXPECT_FALSE(c.use_cnn);
  const auto again = parse_config(format_config(c));
  EXPECT_EQ(format_config(again), format_config(c));
  EXPECT_EQ(again.learning_rate, c.learning_rate);
  EXPECT_EQ(again.split.train, 0.7);
}

TEST(TrainConfigTest, UnknownKeyAndBadValue) {
  EXPECT_THROW(parse_config("bogus=1\n"), ConfigError);
  EXPECT_THROW(parse_config("epochs=three\n"), ConfigError);
  EXPECT_THROW(parse_config("fgm.enabled=maybe\n"), ConfigError);
  EXPECT_THROW(parse_config("no equals sign\n"), ConfigError);
}

// ---- loop --------------------------------------------------------------------

std::vector<EncodedExample> random_examples(size_t n, uint64_t seed) {
  Prng rng(seed);
  std::vector<EncodedExample> out;
  for (size_t i = 0; i < n; ++i) {
    EncodedExample e;
    const size_t len = 1 + rng.uniform_index(7);
    for (size_t t = 0; t < len; ++t) e.tokens.push_back(static_cast<TokenId>(2 + rng.uniform_index(18)));
    e.label = static_cast<ClassId>(rng.uniform_index(3));
    out.push_back(e);
  }
  return out;
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.epochs = 2;
  c.batch_size = 4;
  c.embed_dim = 6;
  c.kernels = 5;
  c.hidden = 4;
  return c;
}

TEST(TrainTest, TwoRunsAreBitIdentical) {
  const auto data = random_examples(30, 1);
  const auto val = random_examples(8, 2);
  const auto cfg = tiny_config();
  Model a = make_model(cfg, 20, 3), b = make_model(cfg, 20, 3);
  const auto la = train(a, data, val, cfg);
  const auto lb = train(b, data, val, cfg);
  const auto pa = a.parameters(), pb = b.parameters();
  for (size_t i = 0; i < pa.size(); ++i) EXPECT_TRUE(bit_equal(pa[i]->value, pb[i]->value));
  ASSERT_EQ(la.epochs.size(), 2u);
  for (size_t e = 0; e < 2; ++e) EXPECT_EQ(la.epochs[e].train_loss, lb.epochs[e].train_loss);
}

TEST(TrainTest, LogHasOneRecordPerEpoch) {
  auto cfg = tiny_config();
  cfg.epochs = 3;
  Model m = make_model(cfg, 20, 3);
  size_t calls = 0;
  const auto log = train(m, random_examples(20, 3), random_examples(6, 4), cfg,
                         [&](const EpochRecord& r) { EXPECT_EQ(r.epoch, ++calls); });
  EXPECT_EQ(calls, 3u);
  ASSERT_EQ(log.epochs.size(), 3u);
  for (const auto& r : log.epochs) {
    EXPECT_TRUE(r.adversarial_loss.has_value());
    ASSERT_TRUE(r.val.has_value());
    EXPECT_EQ(r.val->confusion.total(), 6u);
  }
  EXPECT_TRUE(log.best_epoch.has_value());
  const auto j = train_log_to_json(log);
  EXPECT_EQ(j["epochs"].size(), 3u);
}

TEST(TrainTest, EmptyTrainingSet) {
  const auto cfg = tiny_config();
  Model m = make_model(cfg, 20, 3);
  EXPECT_THROW(train(m, {}, {}, cfg), DataError);
}

TEST(TrainTest, DivergenceNamesEpochAndBatch) {
  const auto cfg = tiny_config();
  Model m = make_model(cfg, 20, 3);
  m.fc.weight.value(0, 0) = NAN;
  try {
    train(m, random_examples(10, 5), {}, cfg);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch 1, batch 1"), std::string::npos) << e.what();
  }
}

TEST(TrainTest, EpochSeedsDiffer) {
  EXPECT_NE(epoch_shuffle_seed(24, 1), epoch_shuffle_seed(24, 2));
  EXPECT_NE(epoch_shuffle_seed(24, 1), epoch_shuffle_seed(25, 1));
  EXPECT_EQ(epoch_shuffle_seed(24, 3), epoch_shuffle_seed(24, 3));
}

// On the keyword corpus with a learning rate low enough that epoch 1 has not
// yet converged, validation accuracy climbs every epoch.
TEST(TrainTest, ValidationAccuracyImprovesOnSyntheticCorpus) {
  const auto corpus = make_synthetic_corpus({});
  TrainConfig cfg;
  cfg.scratch_lr = 1e-4;
  cfg.epochs = 3;
  const auto result = run_pipeline(corpus.dataset, cfg);
  const auto& eps = result.log.epochs;
  ASSERT_EQ(eps.size(), 3u);
  ASSERT_TRUE(result.log.best_epoch.has_value());
  EXPECT_GT(*result.log.best_epoch, 1u);
  for (size_t e = 1; e < *result.log.best_epoch; ++e) {
    EXPECT_GT(eps[e].val->accuracy, eps[e - 1].val->accuracy) << "epoch " << e + 1;
  }
}

}  // namespace
}  // namespace acls
