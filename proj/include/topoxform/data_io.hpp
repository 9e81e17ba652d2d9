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

#include <filesystem>
#include <optional>
#include <vector>

#include "topoxform/dense.hpp"
#include "topoxform/graph.hpp"
#include "topoxform/transform.hpp"

namespace topoxform {

struct SplitMasks {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
};

// Node-level dataset. labels[i] == -1 marks an unlabeled node.
struct Dataset {
  Graph graph;
  DenseMatrix features;
  std::vector<int> labels;
  std::optional<SplitMasks> splits;
  // Later snapshots of a temporal sequence over the same node set.
  std::vector<Graph> temporal;

  std::size_t num_classes() const;
};

struct LabeledGraph {
  Graph graph;
  DenseMatrix features;
  int label = 0;
};

struct GraphCollection {
  std::vector<LabeledGraph> graphs;

  std::size_t num_classes() const;
};

struct LinkSplit {
  std::vector<NodePair> train_edges;
  std::vector<NodePair> val_edges;
  std::vector<NodePair> test_edges;
  std::vector<NodePair> val_neg;
  std::vector<NodePair> test_neg;
};

struct SbmSpec {
  std::size_t block_size = 100;
  std::size_t blocks = 3;
  double p_in = 0.1;
  double p_out = 0.01;
  std::size_t feature_dim = 16;
  double feature_shift = 1.0;
};

// Directory layout: edges.txt, features.txt, and optionally labels.txt,
// splits.json and edges_next.txt (second temporal snapshot).
Dataset load_citation_dataset(const std::filesystem::path& dir);
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);

// Parses the individual file formats (exposed for tests).
// Headerless CSV, one row per matrix row, shortest round-trip formatting.
void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m);

DenseMatrix read_features(const std::filesystem::path& path);
std::vector<int> read_labels(const std::filesystem::path& path, std::size_t num_nodes);
SplitMasks read_splits(const std::filesystem::path& path, std::size_t num_nodes);

// index.json {"graphs": [subdir, ...]}; each subdirectory holds edges.txt,
// features.txt and graph_labels.txt (a single integer).
GraphCollection load_graph_collection(const std::filesystem::path& dir);
void write_graph_collection(const std::filesystem::path& dir, const GraphCollection& collection);

// Planted-partition graph. Features are unit Gaussian noise plus feature_shift
// on channel (block mod feature_dim); labels are block ids; 60/20/20 splits.
Dataset generate_sbm(const SbmSpec& spec, Rng& rng);

// Next snapshot of an SBM graph: round(fraction * M) edges removed uniformly and
// as many new edges added with SBM pair probabilities.
Graph drift_sbm(const Graph& graph, std::span<const int> blocks, const SbmSpec& spec,
                double fraction, Rng& rng);

// Random 85/10/5 (train/test/val) edge partition plus matching negatives.
LinkSplit link_split(const Graph& graph, Rng& rng);

// Small synthetic graph-classification corpus: class 0 graphs are Erdos-Renyi,
// class 1 graphs are two-block SBMs of the same expected density. Node features
// are one-hot degrees capped at feature_dim - 1.
GraphCollection generate_graph_collection(std::size_t num_graphs, std::size_t min_nodes,
                                          std::size_t max_nodes, std::size_t feature_dim, Rng& rng);

DenseMatrix degree_one_hot(const Graph& graph, std::size_t feature_dim);

}  // namespace topoxform
