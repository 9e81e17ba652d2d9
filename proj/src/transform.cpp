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
#include <cmath>
#include <ostream>
#include <unordered_set>

#include "topoxform/error.hpp"

namespace topoxform {
namespace {

std::uint64_t pair_key(NodePair p) {
  return (static_cast<std::uint64_t>(p.first) << 32) | p.second;
}

}  // namespace

PairSets sample_pairs(const Graph& graph, Rng& rng) {
  const std::size_t n = graph.num_nodes();
  if (n < 2) throw_invalid("sample_pairs: graph needs at least 2 nodes");
  PairSets sets;
  sets.connected = graph.edges();
  const std::size_t m = graph.num_edges();
  const std::size_t total = n * (n - 1) / 2;
  const std::size_t available = total - m;
  const std::size_t wanted = std::min(m, available);
  if (wanted == 0) return sets;

  if (available <= 2 * wanted) {
    // Dense regime: enumerate non-edges and take a uniform subset.
    std::vector<NodePair> candidates;
    candidates.reserve(available);
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = i + 1; j < n; ++j)
        if (!graph.has_edge(i, j)) candidates.push_back({i, j});
    for (std::size_t k = 0; k < wanted; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, candidates.size() - 1);
      std::swap(candidates[k], candidates[pick(rng)]);
    }
    candidates.resize(wanted);
    sets.disconnected = std::move(candidates);
    return sets;
  }

  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(wanted * 2);
  sets.disconnected.reserve(wanted);
  std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(n - 1));
  while (sets.disconnected.size() < wanted) {
    const NodeId u = node(rng);
    const NodeId v = node(rng);
    if (u == v) continue;
    const NodePair p = make_pair_canonical(u, v);
    if (graph.has_edge(p.first, p.second)) continue;
    if (!chosen.insert(pair_key(p)).second) continue;
    sets.disconnected.push_back(p);
  }
  return sets;
}

std::size_t flip_count(double rate, std::size_t set_size) {
  return static_cast<std::size_t>(std::floor(rate * static_cast<double>(set_size) + 0.5));
}

TransformPlan split_pairs(const PairSets& pairs, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw_invalid("split_pairs: rate must lie in [0, 1], got " + std::to_string(rate));
  TransformPlan plan;
  plan.rate = rate;
  auto split = [&](const std::vector<NodePair>& set, std::vector<NodePair>& flip,
                   std::vector<NodePair>& keep) {
    std::vector<NodePair> shuffled = set;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const std::size_t k = flip_count(rate, shuffled.size());
    flip.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(k));
    keep.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(k), shuffled.end());
    std::sort(flip.begin(), flip.end());
    std::sort(keep.begin(), keep.end());
  };
  split(pairs.disconnected, plan.disconnected_flip, plan.disconnected_keep);
  split(pairs.connected, plan.connected_flip, plan.connected_keep);
  return plan;
}

Graph flip_pairs(const Graph& graph, std::span<const NodePair> pairs) {
  std::unordered_set<std::uint64_t> toggled;
  toggled.reserve(pairs.size() * 2);
  std::vector<NodePair> added;
  for (const auto& raw : pairs) {
    const NodePair p = make_pair_canonical(raw.first, raw.second);
    if (!toggled.insert(pair_key(p)).second) continue;
    if (!graph.has_edge(p.first, p.second)) added.push_back(p);
  }
  std::vector<NodePair> edges;
  edges.reserve(graph.num_edges() + added.size());
  for (const auto& e : graph.edges())
    if (!toggled.contains(pair_key(e))) edges.push_back(e);
  edges.insert(edges.end(), added.begin(), added.end());
  return build_graph(edges, graph.num_nodes());
}

TransformedGraph apply_transform(const Graph& graph, const TransformPlan& plan) {
  auto require = [&](const std::vector<NodePair>& set, bool connected) {
    for (const auto& p : set) {
      if (p.first >= p.second || p.second >= graph.num_nodes() ||
          graph.has_edge(p.first, p.second) != connected) {
        throw_invalid("apply_transform: pair (" + std::to_string(p.first) + ", " +
                      std::to_string(p.second) + ") is not a valid " +
                      (connected ? "connected" : "disconnected") + " pair of the graph");
      }
    }
  };
  require(plan.disconnected_flip, false);
  require(plan.disconnected_keep, false);
  require(plan.connected_flip, true);
  require(plan.connected_keep, true);

  std::vector<NodePair> flips = plan.disconnected_flip;
  flips.insert(flips.end(), plan.connected_flip.begin(), plan.connected_flip.end());

  TransformedGraph out;
  out.transformed = flip_pairs(graph, flips);
  out.delta.reserve(flips.size());
  for (const auto& p : plan.disconnected_flip) out.delta.push_back({p.first, p.second, +1});
  for (const auto& p : plan.connected_flip) out.delta.push_back({p.first, p.second, -1});
  std::sort(out.delta.begin(), out.delta.end());
  return out;
}

LabeledPairs transform_labels(const TransformPlan& plan) {
  std::vector<std::pair<NodePair, int>> all;
  all.reserve(plan.disconnected_flip.size() + plan.disconnected_keep.size() +
              plan.connected_flip.size() + plan.connected_keep.size());
  auto push = [&](const std::vector<NodePair>& set, PairType type) {
    for (const auto& p : set) all.emplace_back(p, static_cast<int>(type));
  };
  push(plan.disconnected_flip, PairType::kAdd);
  push(plan.connected_flip, PairType::kRemove);
  push(plan.disconnected_keep, PairType::kKeepDisconnected);
  push(plan.connected_keep, PairType::kKeepConnected);
  std::sort(all.begin(), all.end());
  LabeledPairs out;
  out.pairs.reserve(all.size());
  out.labels.reserve(all.size());
  for (const auto& [p, label] : all) {
    out.pairs.push_back(p);
    out.labels.push_back(label);
  }
  return out;
}

TransformDraw draw_transform(const Graph& graph, double rate, Rng& rng) {
  TransformDraw draw;
  const PairSets sets = sample_pairs(graph, rng);
  draw.plan = split_pairs(sets, rate, rng);
  draw.result = apply_transform(graph, draw.plan);
  draw.labeled = transform_labels(draw.plan);
  return draw;
}

void write_plan_csv(std::ostream& out, const LabeledPairs& labeled) {
  for (std::size_t i = 0; i < labeled.size(); ++i)
    out << labeled.pairs[i].first << ',' << labeled.pairs[i].second << ','
        << labeled.labels[i] << '\n';
}

}  // namespace topoxform
