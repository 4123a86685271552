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

#include "acls/heads.h"

#include <gtest/gtest.h>

#include <cmath>

#include "acls/errors.h"
#include "acls/model.h"
#include "oracles.h"
#include "test_util.h"

namespace acls {
namespace {

using testing::random_mat;
using testing::to_rows;

EmbeddingMatrix make_input(Mat values, size_t length) {
  EmbeddingMatrix em;
  em.grad = Mat(values.rows(), values.cols());
  em.values = std::move(values);
  em.length = length;
  return em;
}

EmbeddingMatrix make_input(Mat values) {
  const size_t rows = values.rows();
  return make_input(std::move(values), rows);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// ---- convolution -----------------------------------------------------------

TEST(ConvForwardTest, SingleDotProduct) {
  ConvHead head{ParamTensor("k", Mat(1, 2, {1.0, 2.0}))};
  const auto t = conv_forward(make_input(Mat(1, 2, {3.0, 4.0})), head);
  EXPECT_EQ(t.feature_map(0, 0), 11.0);
  EXPECT_EQ(t.pooled[0], 11.0);
}

TEST(ConvForwardTest, ZeroInput) {
  const ConvHead head = make_conv_head(4, 3, 1);
  const auto t = conv_forward(make_input(Mat(5, 3)), head);
  EXPECT_EQ(t.feature_map, Mat(5, 4));
  for (double p : t.pooled) EXPECT_EQ(p, 0.0);
}

TEST(ConvForwardTest, MatchesNaiveLoop) {
  Prng rng(1);
  const ConvHead head{ParamTensor("k", random_mat(2, 3, rng))};
  const Mat x = random_mat(4, 3, rng);
  const auto t = conv_forward(make_input(x), head);
  const auto want = oracle::naive_conv(to_rows(x), to_rows(head.kernels.value));
  for (size_t i = 0; i < 4; ++i)
    for (size_t k = 0; k < 2; ++k) EXPECT_NEAR(t.feature_map(i, k), want[i][k], 1e-12);
  for (size_t k = 0; k < 2; ++k) {
    double m = want[0][k];
    for (size_t i = 1; i < 4; ++i) m = std::max(m, want[i][k]);
    EXPECT_EQ(t.pooled[k], m);
  }
}

TEST(ConvForwardTest, WidthMismatch) {
  const ConvHead head = make_conv_head(2, 3, 1);
  EXPECT_THROW(conv_forward(make_input(Mat(2, 4)), head), ShapeError);
}

TEST(ConvForwardTest, FeatureMapIsLinearInInput) {
  Prng rng(2);
  const ConvHead head{ParamTensor("k", random_mat(5, 4, rng))};
  for (int t = 0; t < 10; ++t) {
    const Mat x1 = random_mat(6, 4, rng), x2 = random_mat(6, 4, rng);
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    Mat mix(6, 4);
    for (size_t i = 0; i < mix.size(); ++i) mix.data()[i] = a * x1.data()[i] + b * x2.data()[i];
    const auto y = conv_forward(make_input(mix), head).feature_map;
    const auto y1 = conv_forward(make_input(x1), head).feature_map;
    const auto y2 = conv_forward(make_input(x2), head).feature_map;
    for (size_t i = 0; i < y.size(); ++i) {
      ASSERT_NEAR(y.data()[i], a * y1.data()[i] + b * y2.data()[i], 1e-10);
    }
  }
}

TEST(ConvForwardTest, FeatureMapLengthEqualsValidLength) {
  const ConvHead head = make_conv_head(3, 2, 1);
  for (size_t len = 1; len <= 8; ++len) {
    const auto t = conv_forward(make_input(Mat(10, 2, 1.0), len), head);
    EXPECT_EQ(t.feature_map.rows(), len);
  }
}

TEST(ConvForwardTest, PoolingIgnoresPaddingAndBreaksTiesLow) {
  ConvHead head{ParamTensor("k", Mat(1, 1, {1.0}))};
  const auto t = conv_forward(make_input(Mat(4, 1, {2.0, 5.0, 5.0, 9.0}), 3), head);
  EXPECT_EQ(t.pooled[0], 5.0);
  EXPECT_EQ(t.argmax[0], 1u);
}

TEST(ConvBackwardTest, ZeroUpstreamGivesZeroGrads) {
  Prng rng(3);
  ConvHead head{ParamTensor("k", random_mat(3, 2, rng))};
  auto x = make_input(random_mat(4, 2, rng));
  const auto t = conv_forward(x, head);
  conv_backward(std::vector<double>(3, 0.0), t, x, head);
  EXPECT_EQ(head.kernels.grad, Mat(3, 2));
  EXPECT_EQ(x.grad, Mat(4, 2));
}

TEST(ConvBackwardTest, SinglePositionIsPlainLinearAdjoint) {
  Prng rng(4);
  ConvHead head{ParamTensor("k", random_mat(3, 2, rng))};
  auto x = make_input(random_mat(1, 2, rng));
  const auto t = conv_forward(x, head);
  const std::vector<double> dy = {0.5, -1.0, 2.0};
  conv_backward(dy, t, x, head);
  for (size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(t.pooled[k], t.feature_map(0, k));
    for (size_t j = 0; j < 2; ++j) EXPECT_NEAR(head.kernels.grad(k, j), dy[k] * x.values(0, j), 1e-15);
  }
  for (size_t j = 0; j < 2; ++j) {
    double want = 0.0;
    for (size_t k = 0; k < 3; ++k) want += dy[k] * head.kernels.value(k, j);
    EXPECT_NEAR(x.grad(0, j), want, 1e-15);
  }
}

TEST(ConvBackwardTest, PassesGradCheck) {
  Prng rng(5);
  ConvHead head{ParamTensor("conv.kernels", random_mat(4, 3, rng))};
  ParamTensor xp("x", random_mat(5, 3, rng));
  std::vector<double> c(4);
  for (auto& v : c) v = rng.uniform(-1, 1);
  auto objective = [&] {
    return dot(c, conv_forward(make_input(xp.value), head).pooled);
  };
  auto x = make_input(xp.value);
  conv_backward(c, conv_forward(x, head), x, head);
  xp.grad = x.grad;
  ParamTensor* params[] = {&head.kernels, &xp};
  const auto report = grad_check(objective, params);
  EXPECT_TRUE(report.passed) << report.max_rel_error;
}

// ---- LSTM cell ---------------------------------------------------------------

LstmDirection zero_direction(size_t d, size_t h) {
  auto dir = make_lstm_direction("t", d, h, 1);
  for (auto* p : dir.tensors()) p->value.fill(0.0);
  return dir;
}

TEST(LstmCellTest, ZeroFixedPoint) {
  const auto dir = zero_direction(3, 4);
  const auto s = lstm_cell(std::vector<double>(3, 0.0), std::vector<double>(4, 0.0),
                           std::vector<double>(4, 0.0), dir);
  for (size_t r = 0; r < 4; ++r) {
    EXPECT_EQ(s.h[r], 0.0);
    EXPECT_EQ(s.c[r], 0.0);
    EXPECT_EQ(s.gate[kInputGate][r], 0.5);
    EXPECT_EQ(s.gate[kForgetGate][r], 0.5);
    EXPECT_EQ(s.gate[kOutputGate][r], 0.5);
    EXPECT_EQ(s.gate[kCandidate][r], 0.0);
  }
}

TEST(LstmCellTest, SaturatedForgetGateKeepsCell) {
  auto dir = zero_direction(2, 3);
  dir.b[kForgetGate].value.fill(50.0);
  const std::vector<double> c_prev = {0.7, -1.2, 3.0};
  const auto s = lstm_cell(std::vector<double>{1.0, -2.0}, std::vector<double>{0.1, 0.2, 0.3},
                           c_prev, dir);
  for (size_t r = 0; r < 3; ++r) EXPECT_NEAR(s.c[r], c_prev[r], 1e-9);
}

TEST(LstmCellTest, OneStepPassesGradCheck) {
  Prng rng(6);
  const size_t d = 3, h = 4;
  auto dir = make_lstm_direction("cell", d, h, 7);
  for (auto* p : dir.tensors()) p->value = random_mat(p->value.rows(), p->value.cols(), rng, 0.8);
  ParamTensor x("x", random_mat(1, d, rng)), hp("h_prev", random_mat(1, h, rng)),
      cp("c_prev", random_mat(1, h, rng));
  std::vector<double> a(h), b(h);
  for (size_t r = 0; r < h; ++r) {
    a[r] = rng.uniform(-1, 1);
    b[r] = rng.uniform(-1, 1);
  }
  auto objective = [&] {
    const auto s = lstm_cell(x.value.data(), hp.value.data(), cp.value.data(), dir);
    return dot(a, s.h) + dot(b, s.c);
  };
  const auto s = lstm_cell(x.value.data(), hp.value.data(), cp.value.data(), dir);
  std::vector<double> dh_prev, dc_prev;
  lstm_cell_backward(s, x.value.data(), a, b, dir, x.grad.data(), dh_prev, dc_prev);
  hp.grad.data() = dh_prev;
  cp.grad.data() = dc_prev;
  auto params = dir.tensors();
  params.push_back(&x);
  params.push_back(&hp);
  params.push_back(&cp);
  const auto report = grad_check(objective, params);
  EXPECT_TRUE(report.passed) << report.max_rel_error;
}

// ---- BiLSTM ------------------------------------------------------------------

LstmParams random_lstm(size_t d, size_t h, Prng& rng) {
  auto p = make_lstm_params(d, h, 3);
  for (auto* t : p.tensors()) t->value = random_mat(t->value.rows(), t->value.cols(), rng, 0.7);
  return p;
}

TEST(BiLstmTest, ZeroParamsGiveZeroOutput) {
  auto p = make_lstm_params(3, 4, 1);
  for (auto* t : p.tensors()) t->value.fill(0.0);
  Prng rng(7);
  const auto t = bilstm_forward(make_input(random_mat(5, 3, rng)), p);
  ASSERT_EQ(t.output.size(), 8u);
  for (double v : t.output) EXPECT_EQ(v, 0.0);
}

TEST(BiLstmTest, SingleTokenIsTwoCellEvaluations) {
  Prng rng(8);
  const auto p = random_lstm(3, 4, rng);
  const Mat x = random_mat(2, 3, rng);  // CLS row + one token
  const auto t = bilstm_forward(make_input(x), p);
  const std::vector<double> zeros(4, 0.0);
  const auto f = lstm_cell(x.row(1), zeros, zeros, p.forward);
  const auto b = lstm_cell(x.row(1), zeros, zeros, p.backward);
  for (size_t r = 0; r < 4; ++r) {
    EXPECT_EQ(t.output[r], f.h[r]);
    EXPECT_EQ(t.output[4 + r], b.h[r]);
  }
}

TEST(BiLstmTest, NoTokensIsAnError) {
  const auto p = make_lstm_params(3, 2, 1);
  EXPECT_THROW(bilstm_forward(make_input(Mat(1, 3)), p), ShapeError);
}

TEST(BiLstmTest, PassesGradCheck) {
  Prng rng(9);
  auto p = random_lstm(3, 4, rng);
  ParamTensor xp("x", random_mat(6, 3, rng));  // CLS + L=5
  std::vector<double> c(8);
  for (auto& v : c) v = rng.uniform(-1, 1);
  auto objective = [&] { return dot(c, bilstm_forward(make_input(xp.value), p).output); };
  auto x = make_input(xp.value);
  bilstm_backward(c, bilstm_forward(x, p), x, p);
  xp.grad = x.grad;
  for (double g : x.grad.row(0)) EXPECT_EQ(g, 0.0);  // CLS row is not read
  auto params = p.tensors();
  params.push_back(&xp);
  const auto report = grad_check(objective, params);
  EXPECT_TRUE(report.passed) << report.max_rel_error;
}

TEST(BiLstmTest, TrailingPaddingDoesNotChangeOutput) {
  Prng rng(10);
  const auto p = random_lstm(4, 3, rng);
  const Mat x = random_mat(5, 4, rng);
  const auto base = bilstm_forward(make_input(x), p).output;
  for (size_t pad = 0; pad <= 5; ++pad) {
    Mat padded(5 + pad, 4);
    std::copy(x.data().begin(), x.data().end(), padded.data().begin());
    const auto out = bilstm_forward(make_input(padded, 5), p).output;
    for (size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out[i], base[i], 1e-15);
  }
}

TEST(BiLstmTest, ReversalSwapsDirectionsWhenParamsShared) {
  Prng rng(11);
  auto p = random_lstm(3, 4, rng);
  for (size_t g = 0; g < kNumGates; ++g) {
    p.backward.w[g].value = p.forward.w[g].value;
    p.backward.u[g].value = p.forward.u[g].value;
    p.backward.b[g].value = p.forward.b[g].value;
  }
  const Mat x = random_mat(6, 3, rng);
  Mat rev(6, 3);
  std::copy(x.row(0).begin(), x.row(0).end(), rev.row(0).begin());
  for (size_t i = 1; i < 6; ++i) std::copy(x.row(i).begin(), x.row(i).end(), rev.row(6 - i).begin());
  const auto a = bilstm_forward(make_input(x), p).output;
  const auto b = bilstm_forward(make_input(rev), p).output;
  for (size_t r = 0; r < 4; ++r) {
    EXPECT_EQ(a[r], b[4 + r]);
    EXPECT_EQ(a[4 + r], b[r]);
  }
}

// ---- fusion ------------------------------------------------------------------

TEST(FusionTest, ZeroWeightsGiveBias) {
  auto fc = make_fusion_classifier(6, 3, 1);
  fc.weight.value.fill(0.0);
  fc.bias.value = Mat(3, 1, {0.5, -1.0, 2.0});
  const auto logits = fuse_and_classify(std::vector<double>{1, 2}, std::vector<double>{3, 4},
                                        std::vector<double>{5, 6}, fc);
  EXPECT_EQ(logits, (std::vector<double>{0.5, -1.0, 2.0}));
}

TEST(FusionTest, DefaultWidthsConcatenateTo1024) {
  ModelDims dims;
  dims.embed_dim = 768;
  dims.kernels = 128;
  dims.hidden = 64;
  EXPECT_EQ(dims.fusion_width(), 1024u);
}

TEST(FusionTest, MatchesNaiveLoop) {
  Prng rng(12);
  auto fc = make_fusion_classifier(9, 4, 2);
  fc.bias.value = random_mat(4, 1, rng);
  std::vector<double> a(3), b(2), c(4);
  for (auto* v : {&a, &b, &c})
    for (auto& x : *v) x = rng.uniform(-1, 1);
  const auto logits = fuse_and_classify(a, b, c, fc);
  std::vector<double> z = a;
  z.insert(z.end(), b.begin(), b.end());
  z.insert(z.end(), c.begin(), c.end());
  for (size_t k = 0; k < 4; ++k) {
    double want = fc.bias.value(k, 0);
    for (size_t j = 0; j < 9; ++j) want += fc.weight.value(k, j) * z[j];
    EXPECT_NEAR(logits[k], want, 1e-12);
  }
}

TEST(FusionTest, WidthMismatch) {
  const auto fc = make_fusion_classifier(5, 2, 1);
  EXPECT_THROW(fuse_and_classify(std::vector<double>{1}, std::vector<double>{2},
                                 std::vector<double>{3}, fc),
               ShapeError);
}

}  // namespace
}  // namespace acls
