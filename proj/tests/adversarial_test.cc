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

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "acls/errors.h"
#include "acls/training.h"
#include "test_util.h"

namespace acls {
namespace {

using testing::bit_equal;
using testing::random_mat;

ModelDims small_dims() {
  ModelDims d;
  d.vocab_size = 20;
  d.embed_dim = 6;
  d.kernels = 5;
  d.hidden = 4;
  d.classes = 3;
  return d;
}

Batch sample_batch() {
  const std::vector<EncodedExample> ex = {
      {{2, 5, 7, 3, 11}, 1}, {{4, 9, 2}, 2}, {{13, 17, 19, 6}, 0}};
  return batches(ex, 3)[0];
}

std::vector<Mat> grads_of(const Model& m) {
  std::vector<Mat> out;
  for (const auto* p : m.parameters()) out.push_back(p->grad);
  return out;
}

TEST(FgmDeltaTest, ScalesToEpsilon) {
  const Mat d = fgm_delta(Mat(1, 2, {3.0, 4.0}), 1.0);
  EXPECT_NEAR(d(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(d(0, 1), 0.8, 1e-15);
}

TEST(FgmDeltaTest, ZeroEpsilonAndFlatGradient) {
  Prng rng(1);
  EXPECT_EQ(fgm_delta(random_mat(3, 4, rng), 0.0), Mat(3, 4));
  EXPECT_EQ(fgm_delta(Mat(3, 4), 1.0), Mat(3, 4));
  EXPECT_EQ(fgm_delta(Mat(2, 2, 1e-14), 1.0), Mat(2, 2));
}

TEST(FgmDeltaTest, RejectsBadInput) {
  EXPECT_THROW(fgm_delta(Mat(1, 2, 1.0), -0.5), ConfigError);
  EXPECT_THROW(fgm_delta(Mat(1, 2, {1.0, NAN}), 1.0), NumericError);
}

TEST(FgmDeltaTest, NormAndDirection) {
  Prng rng(2);
  for (int t = 0; t < 50; ++t) {
    const Mat g = random_mat(5, 8, rng);
    const double eps = rng.uniform(0.01, 3.0);
    const Mat d = fgm_delta(g, eps);
    double dd = 0, gg = 0, dg = 0;
    for (size_t i = 0; i < g.size(); ++i) {
      dd += d.data()[i] * d.data()[i];
      gg += g.data()[i] * g.data()[i];
      dg += d.data()[i] * g.data()[i];
    }
    EXPECT_NEAR(std::sqrt(dd), eps, 1e-12);
    EXPECT_NEAR(dg / std::sqrt(dd * gg), 1.0, 1e-12);
  }
}

TEST(PerturbationStateTest, RestoreIsBitExact) {
  Prng rng(3);
  std::vector<EmbeddingMatrix> xs(2);
  xs[0].values = random_mat(4, 3, rng);
  xs[1].values = random_mat(2, 3, rng);
  const auto before0 = xs[0].values, before1 = xs[1].values;
  PerturbationState s;
  s.apply(xs, {random_mat(4, 3, rng, 1e-3), random_mat(2, 3, rng, 1e7)});
  EXPECT_TRUE(s.active());
  EXPECT_FALSE(bit_equal(xs[0].values, before0));
  EXPECT_THROW(s.apply(xs, {Mat(4, 3), Mat(2, 3)}), std::logic_error);
  s.restore(xs);
  EXPECT_FALSE(s.active());
  EXPECT_TRUE(bit_equal(xs[0].values, before0));
  EXPECT_TRUE(bit_equal(xs[1].values, before1));
}

TEST(PerturbationStateTest, ShapeChecked) {
  std::vector<EmbeddingMatrix> xs(1);
  xs[0].values = Mat(3, 2);
  PerturbationState s;
  EXPECT_THROW(s.apply(xs, {Mat(2, 2)}), ShapeError);
  EXPECT_THROW(s.apply(xs, {}), ShapeError);
}

TEST(FgmStepTest, ZeroEpsilonDoublesCleanGrads) {
  const Batch b = sample_batch();
  Model clean(small_dims(), 4);
  Model adv = clean;
  auto xs = embed_batch(clean, b);
  batch_forward_backward(clean, b, xs);
  const auto losses = fgm_train_step(adv, b, FgmConfig{0.0, true});
  ASSERT_TRUE(losses.adversarial.has_value());
  EXPECT_EQ(*losses.adversarial, losses.clean);
  const auto g1 = grads_of(clean), g2 = grads_of(adv);
  for (size_t i = 0; i < g1.size(); ++i) {
    Mat twice = g1[i];
    for (double& v : twice.data()) v *= 2.0;
    EXPECT_TRUE(bit_equal(g2[i], twice)) << i;
  }
}

TEST(FgmStepTest, DisabledRunsOnePass) {
  const Batch b = sample_batch();
  Model clean(small_dims(), 4);
  Model step = clean;
  auto xs = embed_batch(clean, b);
  const double loss = batch_forward_backward(clean, b, xs);
  const auto losses = fgm_train_step(step, b, FgmConfig{1.0, false});
  EXPECT_FALSE(losses.adversarial.has_value());
  EXPECT_EQ(losses.clean, loss);
  const auto g1 = grads_of(clean), g2 = grads_of(step);
  for (size_t i = 0; i < g1.size(); ++i) EXPECT_TRUE(bit_equal(g1[i], g2[i])) << i;
}

TEST(FgmStepTest, MatchesTwoManualPasses) {
  const Batch b = sample_batch();
  Model manual(small_dims(), 4);
  Model step = manual;
  auto xs = embed_batch(manual, b);
  batch_forward_backward(manual, b, xs);
  for (auto& x : xs) {
    const Mat d = fgm_delta(x.grad, 0.1);
    for (size_t i = 0; i < d.size(); ++i) x.values.data()[i] += d.data()[i];
  }
  const double adv = batch_forward_backward(manual, b, xs);
  const auto losses = fgm_train_step(step, b, FgmConfig{0.1, true});
  EXPECT_NEAR(*losses.adversarial, adv, 1e-12);
  const auto g1 = grads_of(manual), g2 = grads_of(step);
  for (size_t i = 0; i < g1.size(); ++i)
    for (size_t j = 0; j < g1[i].size(); ++j) EXPECT_NEAR(g1[i].data()[j], g2[i].data()[j], 1e-12);
}

TEST(FgmStepTest, EmbeddingsRestoredAfterStep) {
  const Batch b = sample_batch();
  Model m(small_dims(), 4);
  auto xs = embed_batch(m, b);
  std::vector<Mat> before;
  for (const auto& x : xs) before.push_back(x.values);
  const auto table = m.embedding.table.value;
  fgm_train_step(m, b, FgmConfig{1.0, true}, xs);
  for (size_t i = 0; i < xs.size(); ++i) EXPECT_TRUE(bit_equal(xs[i].values, before[i]));
  EXPECT_TRUE(bit_equal(m.embedding.table.value, table));
}

TEST(FgmStepTest, PaddingRowsAreNotPerturbed) {
  const Batch b = sample_batch();
  Model m(small_dims(), 4);
  const auto losses = fgm_train_step(m, b, FgmConfig{1.0, true});
  for (size_t i = 0; i < b.size(); ++i) {
    const Mat& d = losses.deltas[i];
    for (size_t r = b.lengths[i] + 1; r < d.rows(); ++r)
      for (double v : d.row(r)) EXPECT_EQ(v, 0.0);
  }
}

TEST(FgmStepTest, SmallEpsilonRaisesLoss) {
  const Batch b = sample_batch();
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    Model m(small_dims(), seed);
    const auto losses = fgm_train_step(m, b, FgmConfig{1e-3, true});
    EXPECT_GT(*losses.adversarial, losses.clean) << seed;
  }
}

TEST(FgmStepTest, FgmOffTrainingMatchesManualLoop) {
  std::vector<EncodedExample> data;
  Prng rng(5);
  for (int i = 0; i < 24; ++i) {
    EncodedExample e;
    const size_t len = 1 + rng.uniform_index(6);
    for (size_t t = 0; t < len; ++t) e.tokens.push_back(static_cast<TokenId>(2 + rng.uniform_index(18)));
    e.label = static_cast<ClassId>(rng.uniform_index(3));
    data.push_back(e);
  }
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 5;
  cfg.fgm.enabled = false;
  cfg.embed_dim = 6;
  cfg.kernels = 5;
  cfg.hidden = 4;
  Model trained = make_model(cfg, 20, 3);
  Model manual = trained;
  train(trained, data, {}, cfg);

  auto params = manual.trainable_parameters();
  AdamState adam = make_adam_state(params);
  for (size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (const auto& b : batches(data, cfg.batch_size, epoch_shuffle_seed(cfg.seed, epoch))) {
      auto xs = embed_batch(manual, b);
      batch_forward_backward(manual, b, xs);
      adam_step(params, adam, cfg.scratch_lr);
      manual.zero_grads();
    }
  }
  const auto a = trained.parameters();
  const auto m = manual.parameters();
  for (size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(bit_equal(a[i]->value, m[i]->value)) << a[i]->name;
}

}  // namespace
}  // namespace acls
