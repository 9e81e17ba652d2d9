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

#include "topoxform/transform.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "test_helpers.hpp"
#include "topoxform/data_io.hpp"
#include "topoxform/error.hpp"

namespace topoxform {
namespace {

using testing::path3;
using testing::random_graph;
using testing::triangle;

std::array<int, 4> histogram(const LabeledPairs& labeled) {
  std::array<int, 4> h{};
  for (int l : labeled.labels) ++h.at(static_cast<std::size_t>(l));
  return h;
}

PairSets synthetic_sets(std::size_t per_side) {
  PairSets sets;
  for (NodeId i = 0; i < per_side; ++i) {
    sets.connected.push_back({i, static_cast<NodeId>(per_side + i)});
    sets.disconnected.push_back({i, static_cast<NodeId>(2 * per_side + i)});
  }
  return sets;
}

TEST(SamplePairsTest, CompleteGraphHasNoDisconnectedPairs) {
  Rng rng(1);
  const PairSets sets = sample_pairs(triangle(), rng);
  EXPECT_EQ(sets.connected.size(), 3u);
  EXPECT_TRUE(sets.disconnected.empty());
}

TEST(SamplePairsTest, PathForcesTheOnlyCandidate) {
  Rng rng(1);
  const PairSets sets = sample_pairs(path3(), rng);
  EXPECT_EQ(sets.connected, (std::vector<NodePair>{{0, 1}, {1, 2}}));
  EXPECT_EQ(sets.disconnected, (std::vector<NodePair>{{0, 2}}));
}

TEST(SamplePairsTest, RejectsTinyGraphs) {
  Rng rng(1);
  EXPECT_THROW(sample_pairs(build_graph({}, 1), rng), Error);
}

TEST(SamplePairsTest, DisconnectedSetIsValidAndSized) {
  Rng rng(2);
  for (double p : {0.05, 0.3, 0.8}) {
    const Graph g = random_graph(30, p, rng);
    const PairSets sets = sample_pairs(g, rng);
    const std::size_t non_edges = 30 * 29 / 2 - g.num_edges();
    EXPECT_EQ(sets.disconnected.size(), std::min(g.num_edges(), non_edges));
    std::set<NodePair> seen;
    for (const NodePair& q : sets.disconnected) {
      EXPECT_LT(q.first, q.second);
      EXPECT_FALSE(g.has_edge(q.first, q.second));
      EXPECT_TRUE(seen.insert(q).second);
    }
  }
}

// Each non-edge is included with probability M / K. The chi-square statistic of
// the inclusion counts over all K non-edges has mean ~K and sd ~sqrt(2K).
TEST(SamplePairsTest, UniformOverDisconnectedPairs) {
  SbmSpec spec;
  spec.block_size = 25;
  spec.blocks = 2;
  spec.p_in = 0.2;
  spec.p_out = 0.02;
  Rng data_rng(3);
  const Graph g = generate_sbm(spec, data_rng).graph;
  const std::size_t n = g.num_nodes();
  const std::size_t k = n * (n - 1) / 2 - g.num_edges();
  const double p = static_cast<double>(g.num_edges()) / static_cast<double>(k);

  std::map<NodePair, int> counts;
  Rng rng(4);
  const int draws = 1000;
  for (int d = 0; d < draws; ++d)
    for (const NodePair& q : sample_pairs(g, rng).disconnected) ++counts[q];

  const double expected = draws * p;
  const double variance = draws * p * (1.0 - p);
  double chi2 = 0.0;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) {
      if (g.has_edge(i, j)) continue;
      const double c = counts.count({i, j}) ? counts[{i, j}] : 0;
      chi2 += (c - expected) * (c - expected) / variance;
    }
  EXPECT_NEAR(chi2, static_cast<double>(k), 5.0 * std::sqrt(2.0 * static_cast<double>(k)));
}

TEST(SplitPairsTest, FlipCountsRoundToNearest) {
  EXPECT_EQ(flip_count(0.7, 10), 7u);
  EXPECT_EQ(flip_count(0.5, 3), 2u);
  EXPECT_EQ(flip_count(0.25, 2), 1u);
  EXPECT_EQ(flip_count(0.0, 9), 0u);
  EXPECT_EQ(flip_count(1.0, 9), 9u);
}

TEST(SplitPairsTest, SizesAndPartition) {
  Rng rng(5);
  const PairSets sets = synthetic_sets(10);
  const TransformPlan plan = split_pairs(sets, 0.7, rng);
  EXPECT_EQ(plan.connected_flip.size(), 7u);
  EXPECT_EQ(plan.connected_keep.size(), 3u);
  EXPECT_EQ(plan.disconnected_flip.size(), 7u);

  std::vector<NodePair> joined = plan.connected_flip;
  joined.insert(joined.end(), plan.connected_keep.begin(), plan.connected_keep.end());
  std::sort(joined.begin(), joined.end());
  std::vector<NodePair> original = sets.connected;
  std::sort(original.begin(), original.end());
  EXPECT_EQ(joined, original);
}

TEST(SplitPairsTest, BoundaryRates) {
  Rng rng(6);
  const PairSets sets = synthetic_sets(8);
  const TransformPlan none = split_pairs(sets, 0.0, rng);
  EXPECT_TRUE(none.connected_flip.empty());
  EXPECT_TRUE(none.disconnected_flip.empty());
  const auto h0 = histogram(transform_labels(none));
  EXPECT_EQ(h0[0] + h0[1], 0);

  const TransformPlan all = split_pairs(sets, 1.0, rng);
  EXPECT_TRUE(all.connected_keep.empty());
  EXPECT_TRUE(all.disconnected_keep.empty());
  const auto h1 = histogram(transform_labels(all));
  EXPECT_EQ(h1[2] + h1[3], 0);
}

TEST(SplitPairsTest, RejectsRateOutsideUnitInterval) {
  Rng rng(7);
  EXPECT_THROW(split_pairs(synthetic_sets(3), 1.5, rng), Error);
  EXPECT_THROW(split_pairs(synthetic_sets(3), -0.1, rng), Error);
  EXPECT_THROW(split_pairs(synthetic_sets(3), std::nan(""), rng), Error);
}

TEST(ApplyTransformTest, EmptyFlipsAreIdentity) {
  TransformPlan plan;
  plan.connected_keep = path3().edges();
  const TransformedGraph t = apply_transform(path3(), plan);
  EXPECT_EQ(t.transformed.edges(), path3().edges());
  EXPECT_TRUE(t.delta.empty());
}

TEST(ApplyTransformTest, PathAddAndRemove) {
  TransformPlan plan;
  plan.disconnected_flip = {{0, 2}};
  plan.connected_flip = {{0, 1}};
  plan.connected_keep = {{1, 2}};
  const TransformedGraph t = apply_transform(path3(), plan);
  EXPECT_EQ(t.transformed.edges(), (std::vector<NodePair>{{0, 2}, {1, 2}}));
  EXPECT_EQ(t.delta, (std::vector<SignedPair>{{0, 1, -1}, {0, 2, +1}}));
}

TEST(ApplyTransformTest, RejectsInconsistentPlans) {
  TransformPlan add_existing;
  add_existing.disconnected_flip = {{0, 1}};
  EXPECT_THROW(apply_transform(path3(), add_existing), Error);
  TransformPlan remove_missing;
  remove_missing.connected_flip = {{0, 2}};
  EXPECT_THROW(apply_transform(path3(), remove_missing), Error);
}

TEST(ApplyTransformTest, XorInvolutionAndDeltaSupport) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Graph g = random_graph(20, 0.2, rng);
    const TransformDraw draw = draw_transform(g, 0.5, rng);
    const Graph& t = draw.result.transformed;

    std::vector<NodePair> flipped = draw.plan.disconnected_flip;
    flipped.insert(flipped.end(), draw.plan.connected_flip.begin(), draw.plan.connected_flip.end());
    EXPECT_EQ(flip_pairs(t, flipped).edges(), g.edges());

    // Delta support equals the flip sets and matches A~ - A entrywise.
    const DenseMatrix diff = subtract(testing::dense_adjacency(t), testing::dense_adjacency(g));
    std::size_t nonzero = 0;
    for (double v : diff.values()) nonzero += v != 0.0;
    EXPECT_EQ(nonzero, 2 * draw.result.delta.size());
    EXPECT_EQ(draw.result.delta.size(), flipped.size());
    for (const SignedPair& d : draw.result.delta) EXPECT_EQ(diff(d.first, d.second), d.sign);
  }
}

TEST(TransformLabelsTest, BalancedHistogram) {
  Rng rng(9);
  const LabeledPairs labeled = transform_labels(split_pairs(synthetic_sets(100), 0.5, rng));
  EXPECT_EQ(histogram(labeled), (std::array<int, 4>{50, 50, 50, 50}));
  EXPECT_TRUE(std::is_sorted(labeled.pairs.begin(), labeled.pairs.end()));
}

TEST(TransformLabelsTest, LabelsMatchPlanMembership) {
  Rng rng(10);
  const Graph g = random_graph(25, 0.2, rng);
  const TransformDraw draw = draw_transform(g, 0.4, rng);
  std::map<NodePair, int> expected;
  for (const auto& p : draw.plan.disconnected_flip) expected[p] = 0;
  for (const auto& p : draw.plan.connected_flip) expected[p] = 1;
  for (const auto& p : draw.plan.disconnected_keep) expected[p] = 2;
  for (const auto& p : draw.plan.connected_keep) expected[p] = 3;
  ASSERT_EQ(draw.labeled.size(), expected.size());
  for (std::size_t i = 0; i < draw.labeled.size(); ++i)
    EXPECT_EQ(draw.labeled.labels[i], expected.at(draw.labeled.pairs[i]));
}

TEST(TransformTest, SameSeedSameDraw) {
  Rng graph_rng(11);
  const Graph g = random_graph(30, 0.15, graph_rng);
  Rng a(99), b(99);
  const TransformDraw x = draw_transform(g, 0.7, a);
  const TransformDraw y = draw_transform(g, 0.7, b);
  EXPECT_EQ(x.labeled.pairs, y.labeled.pairs);
  EXPECT_EQ(x.labeled.labels, y.labeled.labels);
  EXPECT_EQ(x.result.delta, y.result.delta);
}

TEST(TransformTest, PlanCsv) {
  LabeledPairs labeled;
  labeled.pairs = {{0, 2}, {1, 3}};
  labeled.labels = {0, 3};
  std::ostringstream out;
  write_plan_csv(out, labeled);
  EXPECT_EQ(out.str(), "0,2,0\n1,3,3\n");
}

}  // namespace
}  // namespace topoxform
