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
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "topoxform/graph.hpp"

namespace topoxform {

using Rng = std::mt19937_64;

// Transformation type of a sampled pair, in decoder output order.
enum class PairType : int {
  kAdd = 0,                // disconnected pair gains an edge
  kRemove = 1,             // connected pair loses its edge
  kKeepDisconnected = 2,
  kKeepConnected = 3,
};
inline constexpr int kNumPairTypes = 4;

struct PairSets {
  std::vector<NodePair> disconnected;  // sampled non-edges
  std::vector<NodePair> connected;     // every edge of the graph
};

struct TransformPlan {
  std::vector<NodePair> disconnected_flip;
  std::vector<NodePair> disconnected_keep;
  std::vector<NodePair> connected_flip;
  std::vector<NodePair> connected_keep;
  double rate = 0.0;
};

struct TransformedGraph {
  Graph transformed;
  std::vector<SignedPair> delta;  // sorted by pair; +1 added, -1 removed
};

struct LabeledPairs {
  std::vector<NodePair> pairs;
  std::vector<int> labels;  // PairType values

  std::size_t size() const noexcept { return pairs.size(); }
};

// All edges plus min(M, #non-edges) uniformly drawn non-edges.
PairSets sample_pairs(const Graph& graph, Rng& rng);

// Flip count per set is floor(rate * size + 0.5).
std::size_t flip_count(double rate, std::size_t set_size);
TransformPlan split_pairs(const PairSets& pairs, double rate, Rng& rng);

// XOR of the graph with the flip sets of the plan. Throws if a disconnected-side
// pair is an edge or a connected-side pair is not.
TransformedGraph apply_transform(const Graph& graph, const TransformPlan& plan);

// Plain XOR of adjacency entries at the given pairs; no plan validation.
Graph flip_pairs(const Graph& graph, std::span<const NodePair> pairs);

// Every sampled pair with its type, sorted by pair.
LabeledPairs transform_labels(const TransformPlan& plan);

// Convenience: sample, split, apply and label in one draw.
struct TransformDraw {
  TransformPlan plan;
  TransformedGraph result;
  LabeledPairs labeled;
};
TransformDraw draw_transform(const Graph& graph, double rate, Rng& rng);

// "i,j,label" lines.
void write_plan_csv(std::ostream& out, const LabeledPairs& labeled);

}  // namespace topoxform
