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

#pragma once

#include <cstdint>
#include <optional>

#include "topoxform/data_io.hpp"
#include "topoxform/eval.hpp"
#include "topoxform/training.hpp"

namespace topoxform {

// Independent deterministic stream `stream` derived from a run seed.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

// Stream ids; every consumer of randomness in a run owns one.
enum RngStream : std::uint64_t {
  kStreamInit = 1,
  kStreamTrain = 2,
  kStreamProbe = 3,
  kStreamSplit = 4,
  kStreamNoise = 5,
  kStreamFineTune = 6,
  kStreamEval = 7,
  kStreamData = 8,
};

struct NodeTaskConfig {
  EncoderSpec encoder;  // in_channels is taken from the dataset
  TrainConfig train;
  ProbeConfig probe;
  double feature_slope = 0.1;  // LeakyReLU on frozen representations before the probe
  bool pretrain = true;
  std::uint64_t seed = 1;
};

struct NodeTaskResult {
  TrainResult train;
  double accuracy = 0.0;
};

// Pretrains on the dataset graph (unless pretrain == false) and probes node labels.
NodeTaskResult run_node_classification(const Dataset& dataset, const NodeTaskConfig& config);

// Probe accuracy of given frozen encoder parameters.
double probe_encoder(const EncoderParams& encoder, const Dataset& dataset, double feature_slope,
                     const ProbeConfig& probe);

struct LinkTaskConfig {
  EncoderSpec encoder;
  TrainConfig train;
  LinkTrainConfig finetune;
  bool pretrain = true;
  std::uint64_t seed = 1;
};

struct LinkTaskResult {
  TrainResult train;
  RankingMetrics val;
  RankingMetrics test;
  std::size_t train_edges = 0;
};

// 85/10/5 split, pretraining on the training graph, inner-product fine-tuning,
// evaluation on held-out edges against sampled non-edges.
LinkTaskResult run_link_prediction(const Dataset& dataset, const LinkTaskConfig& config);

struct TemporalTaskConfig {
  EncoderSpec encoder;
  TrainConfig train;
  bool pretrain = true;
  std::uint64_t seed = 1;
};

struct TemporalTaskResult {
  TrainResult train;
  RankingMetrics test;
  std::size_t added = 0;
  std::size_t removed = 0;
};

// Trains on (prev, next) as (original, transformed) graphs and scores the edges
// of next from the frozen representations of prev.
TemporalTaskResult run_temporal(const Graph& prev, const Graph& next, const DenseMatrix& x,
                                const TemporalTaskConfig& config);

struct GraphTaskConfig {
  EncoderSpec encoder;  // GIN
  TrainConfig train;
  std::size_t batch_size = 64;
  ProbeConfig probe;
  unsigned folds = 10;
  bool pretrain = true;
  std::uint64_t seed = 1;
};

struct GraphTaskResult {
  TrainResult train;
  double accuracy = 0.0;
};

GraphTaskResult run_graph_classification(const GraphCollection& collection,
                                         const GraphTaskConfig& config);

// Block-diagonal union of graphs with stacked features.
struct GraphBatch {
  Graph graph;
  DenseMatrix features;
  std::vector<std::size_t> graph_ids;
  std::vector<NodeId> offsets;
};
GraphBatch make_graph_batch(const GraphCollection& collection, std::span<const std::size_t> members);

struct EquivarianceTaskConfig {
  std::size_t channels = 32;
  TrainConfig train;
  std::uint64_t seed = 1;
};

struct EquivarianceTaskResult {
  TrainResult train;
  double type_accuracy = 0.0;
  std::vector<SignedPair> delta_estimate;
  EquivarianceReport estimated;
  EquivarianceReport truth;  // with the true delta
};

// Trains an order-1 SGC model on (prev, next), estimates the transformation from
// its predicted add/remove pairs, and compares H + dH_est against H~.
EquivarianceTaskResult run_equivariance(const Graph& prev, const Graph& next, const DenseMatrix& x,
                                        const EquivarianceTaskConfig& config);

// Predicted +1 (add) / -1 (remove) entries for the labeled pairs.
std::vector<SignedPair> estimate_delta(const Model& model, const TrainingBatch& batch);

struct GradCheckReport {
  double sgc_order1 = 0.0;
  double sgc_order2 = 0.0;
  double gcn = 0.0;
  double gin = 0.0;

  double worst() const;
};

// Random graph with `nodes` nodes, encoders with `channels` output channels.
GradCheckReport run_gradcheck(std::size_t nodes, std::size_t channels, std::uint64_t seed, double h);

Graph erdos_renyi(std::size_t nodes, double p, Rng& rng);

}  // namespace topoxform
