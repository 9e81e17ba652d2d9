// Copyright 2026 The Topoxform Authors.
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

#include "topoxform/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "test_helpers.hpp"
#include "topoxform/error.hpp"

namespace topoxform {
namespace {

using testing::random_matrix;

TEST(FeatureDiffTest, Basics) {
  Rng rng(1);
  const DenseMatrix h = random_matrix(4, 3, rng);
  EXPECT_EQ(feature_diff(h, h), DenseMatrix(4, 3));
  DenseMatrix shifted = h;
  for (double& v : shifted.values()) v += 1.0;
  EXPECT_LT(max_abs_difference(feature_diff(shifted, h), DenseMatrix(4, 3, 1.0)), 1e-15);
  EXPECT_THROW(feature_diff(h, DenseMatrix(4, 2)), Error);
}

TEST(FeatureDiffTest, MatchesScalarLoop) {
  Rng rng(2);
  const DenseMatrix a = random_matrix(5, 4, rng);
  const DenseMatrix b = random_matrix(5, 4, rng);
  const DenseMatrix d = feature_diff(a, b);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(d(i, c), a(i, c) - b(i, c));
}

TEST(EdgeReprTest, EqualRowsGiveUniform) {
  const DenseMatrix dh{{0.3, -1.0, 2.0, 0.0}, {0.3, -1.0, 2.0, 0.0}};
  const std::vector<NodePair> pairs{{0, 1}};
  EXPECT_EQ(edge_repr(dh, pairs), DenseMatrix(1, 4, 0.25));
}

TEST(EdgeReprTest, HandEvaluation) {
  const DenseMatrix dh{{1.0, 0.0}, {0.0, 0.0}};
  const std::vector<NodePair> pairs{{0, 1}};
  const DenseMatrix e = edge_repr(dh, pairs);
  EXPECT_NEAR(e(0, 0), 0.26894, 1e-5);
  EXPECT_NEAR(e(0, 1), 0.73106, 1e-5);
  EXPECT_NEAR(e(0, 0), std::exp(-1.0) / (std::exp(-1.0) + 1.0), 1e-15);
}

TEST(EdgeReprTest, SymmetricInPairOrder) {
  Rng rng(3);
  const DenseMatrix dh = random_matrix(6, 5, rng);
  const std::vector<NodePair> ij{{1, 4}};
  const std::vector<NodePair> ji{{4, 1}};
  EXPECT_EQ(edge_repr(dh, ij), edge_repr(dh, ji));
}

TEST(EdgeReprTest, UnderflowFallsBackToUniform) {
  const DenseMatrix dh{{100.0, -100.0, 50.0}, {0.0, 0.0, 0.0}};
  const std::vector<NodePair> pairs{{0, 1}};
  EXPECT_EQ(edge_repr(dh, pairs), DenseMatrix(1, 3, 1.0 / 3.0));
}

TEST(PredictTypesTest, ZeroDecoderIsUniform) {
  Rng rng(4);
  const DenseMatrix p = predict_types(zero_decoder(6), random_matrix(5, 6, rng));
  EXPECT_EQ(p, DenseMatrix(5, 4, 0.25));
}

TEST(PredictTypesTest, LogBiasGivesProportions) {
  DecoderParams params = zero_decoder(3);
  for (int c = 0; c < 4; ++c) params.linear.bias(0, c) = std::log(c + 1.0);
  const DenseMatrix p = predict_types(params, DenseMatrix(1, 3, 0.5));
  for (int c = 0; c < 4; ++c) EXPECT_NEAR(p(0, c), 0.1 * (c + 1), 1e-15);
}

TEST(CeLossTest, OracleValues) {
  const std::vector<int> labels{0, 1, 2, 3};
  EXPECT_EQ(ce_loss(DenseMatrix::identity(4), labels), 0.0);
  EXPECT_NEAR(ce_loss(DenseMatrix(4, 4, 0.25), labels), std::log(4.0), 1e-15);
  EXPECT_NEAR(ce_loss(DenseMatrix(4, 4, 0.25), labels), 1.386294, 1e-6);
  const std::vector<int> three{3};
  EXPECT_NEAR(ce_loss(DenseMatrix{{0.1, 0.2, 0.3, 0.4}}, three), 0.916291, 1e-6);
}

TEST(CeLossTest, ClampKeepsLossFinite) {
  const std::vector<int> label{0};
  EXPECT_NEAR(ce_loss(DenseMatrix{{0.0, 1.0, 0.0, 0.0}}, label), -std::log(kLogClamp), 1e-9);
}

TEST(CeLossTest, RejectsBadLabels) {
  const std::vector<int> bad{4};
  EXPECT_THROW(ce_loss(DenseMatrix(1, 4, 0.25), bad), Error);
  EXPECT_THROW(ce_loss(DenseMatrix(1, 4, 0.25), std::vector<int>{}), Error);
}

TEST(CeLossTest, ZeroDecoderGivesLogFourForAnyInput) {
  Rng rng(5);
  const DenseMatrix dh = random_matrix(10, 7, rng);
  const std::vector<NodePair> pairs{{0, 1}, {2, 9}, {3, 4}};
  const std::vector<int> labels{0, 3, 1};
  EXPECT_EQ(ce_loss(predict_types(zero_decoder(7), edge_repr(dh, pairs)), labels), std::log(4.0));
}

TEST(CeLossTest, LogitGradientIsSoftmaxMinusOneHot) {
  Rng rng(6);
  const DenseMatrix logits = random_matrix(5, 4, rng);
  const std::vector<int> labels{0, 2, 3, 1, 2};
  DenseMatrix analytic = softmax_rows(logits);
  for (std::size_t p = 0; p < 5; ++p) analytic(p, labels[p]) -= 1.0;
  for (double& v : analytic.values()) v /= 5.0;

  const double h = 1e-6;
  for (std::size_t p = 0; p < 5; ++p)
    for (std::size_t c = 0; c < 4; ++c) {
      DenseMatrix up = logits, down = logits;
      up(p, c) += h;
      down(p, c) -= h;
      const double numeric =
          (ce_loss(softmax_rows(up), labels) - ce_loss(softmax_rows(down), labels)) / (2 * h);
      EXPECT_LE(std::abs(numeric - analytic(p, c)),
                1e-6 * std::max(std::abs(analytic(p, c)), 1e-3));
    }
}

TEST(CeLossTest, NonNegative) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix p = softmax_rows(random_matrix(6, 4, rng));
    const std::vector<int> labels{0, 1, 2, 3, 0, 1};
    EXPECT_GT(ce_loss(p, labels), 0.0);
  }
}

TEST(DecoderTest, JointChannelPermutationKeepsPredictions) {
  Rng rng(8);
  const DenseMatrix dh = random_matrix(8, 5, rng);
  const std::vector<NodePair> pairs{{0, 1}, {2, 3}, {4, 7}, {5, 6}};
  const DecoderParams params = init_decoder(5, rng);

  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
  DenseMatrix dh_p(8, 5);
  DecoderParams params_p = params;
  for (std::size_t c = 0; c < 5; ++c) {
    for (std::size_t i = 0; i < 8; ++i) dh_p(i, perm[c]) = dh(i, c);
    for (std::size_t k = 0; k < 4; ++k) params_p.linear.weight(perm[c], k) = params.linear.weight(c, k);
  }
  const DenseMatrix a = predict_types(params, edge_repr(dh, pairs));
  const DenseMatrix b = predict_types(params_p, edge_repr(dh_p, pairs));
  EXPECT_EQ(argmax_rows(a), argmax_rows(b));
  EXPECT_LT(max_abs_difference(a, b), 1e-15);
}

TEST(DecoderTest, ArgmaxTiesAndAccuracy) {
  EXPECT_EQ(argmax_rows(DenseMatrix{{0.25, 0.25, 0.25, 0.25}, {0.1, 0.4, 0.4, 0.1}}),
            (std::vector<int>{0, 1}));
  const std::vector<int> pred{0, 1, 2, 3};
  const std::vector<int> labels{0, 1, 0, 0};
  EXPECT_DOUBLE_EQ(accuracy(pred, labels), 0.5);
}

}  // namespace
}  // namespace topoxform
