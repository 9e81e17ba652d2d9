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

#include "topoxform/pipeline.hpp"

#include <gtest/gtest.h>

#include "test_helpers.hpp"
#include "topoxform/error.hpp"

namespace topoxform {
namespace {

TEST(RngTest, StreamsAreReproducibleAndDistinct) {
  Rng a = make_rng(42, kStreamTrain);
  Rng b = make_rng(42, kStreamTrain);
  Rng c = make_rng(42, kStreamProbe);
  Rng d = make_rng(43, kStreamTrain);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
}

TEST(GraphBatchTest, BlockDiagonalUnion) {
  GraphCollection c;
  c.graphs.push_back({testing::path3(), DenseMatrix(3, 2, 1.0), 0});
  c.graphs.push_back({testing::triangle(), DenseMatrix(3, 2, 2.0), 1});
  const std::vector<std::size_t> members{1, 0};
  const GraphBatch batch = make_graph_batch(c, members);
  EXPECT_EQ(batch.graph.num_nodes(), 6u);
  EXPECT_EQ(batch.graph.num_edges(), 5u);
  EXPECT_EQ(batch.offsets, (std::vector<NodeId>{0, 3}));
  EXPECT_EQ(batch.graph_ids, (std::vector<std::size_t>{0, 0, 0, 1, 1, 1}));
  EXPECT_TRUE(batch.graph.has_edge(0, 2));   // triangle first
  EXPECT_TRUE(batch.graph.has_edge(3, 4));   // then the path
  EXPECT_FALSE(batch.graph.has_edge(3, 5));
  EXPECT_FALSE(batch.graph.has_edge(2, 3));
  EXPECT_EQ(batch.features(0, 0), 2.0);
  EXPECT_EQ(batch.features(5, 1), 1.0);
}

TEST(GradCheckReportTest, PassesOnDefaultInstance) {
  const GradCheckReport r = run_gradcheck(20, 8, 1, 1e-5);
  EXPECT_LT(r.worst(), 1e-5);
  EXPECT_EQ(r.worst(), std::max({r.sgc_order1, r.sgc_order2, r.gcn, r.gin}));
}

TEST(GradCheckReportTest, RejectsOutOfRangeSizes) {
  EXPECT_THROW(run_gradcheck(2, 8, 1, 1e-5), Error);
  EXPECT_THROW(run_gradcheck(20, 0, 1, 1e-5), Error);
}

TEST(EstimateDeltaTest, MapsAddAndRemovePredictions) {
  Rng rng(1);
  const Graph g = testing::random_graph(12, 0.3, rng);
  const DenseMatrix x = testing::random_matrix(12, 3, rng);
  const TrainingBatch batch =
      single_graph_source(g, std::make_shared<const DenseMatrix>(x), 0.5)(rng).front();
  EncoderSpec spec;
  spec.in_channels = 3;
  spec.out_channels = 4;
  spec.order = 1;
  Model model = init_model(spec, rng);
  model.decoder = zero_decoder(4);

  // A large bias on the add logit predicts add (+1) for every pair.
  model.decoder.linear.bias(0, 0) = 10.0;
  std::vector<SignedPair> all = estimate_delta(model, batch);
  ASSERT_EQ(all.size(), batch.pairs.size());
  for (const auto& d : all) EXPECT_EQ(d.sign, 1);

  model.decoder.linear.bias(0, 0) = 0.0;
  model.decoder.linear.bias(0, 1) = 10.0;
  for (const auto& d : estimate_delta(model, batch)) EXPECT_EQ(d.sign, -1);

  model.decoder.linear.bias(0, 1) = 0.0;
  model.decoder.linear.bias(0, 3) = 10.0;
  EXPECT_TRUE(estimate_delta(model, batch).empty());
}

TEST(NodeClassificationTest, DeterministicGivenSeed) {
  SbmSpec spec;
  spec.block_size = 20;
  Rng data = make_rng(1, kStreamData);
  const Dataset ds = generate_sbm(spec, data);
  NodeTaskConfig config;
  config.encoder.out_channels = 8;
  config.train.max_epochs = 10;
  config.probe.epochs = 50;
  const NodeTaskResult a = run_node_classification(ds, config);
  const NodeTaskResult b = run_node_classification(ds, config);
  EXPECT_EQ(a.accuracy, b.accuracy);
  ASSERT_EQ(a.train.history.epochs.size(), b.train.history.epochs.size());
  for (std::size_t i = 0; i < a.train.history.epochs.size(); ++i)
    EXPECT_EQ(a.train.history.epochs[i].loss, b.train.history.epochs[i].loss);
}

TEST(ErdosRenyiTest, Extremes) {
  Rng rng(2);
  EXPECT_EQ(erdos_renyi(6, 1.0, rng).num_edges(), 15u);
  EXPECT_EQ(erdos_renyi(6, 0.0, rng).num_edges(), 0u);
}

}  // namespace
}  // namespace topoxform
