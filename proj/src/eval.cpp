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

#include "topoxform/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "topoxform/decoder.hpp"
#include "topoxform/error.hpp"
#include "topoxform/training.hpp"

namespace topoxform {
namespace {

std::uint64_t key(NodePair p) { return (static_cast<std::uint64_t>(p.first) << 32) | p.second; }

DenseMatrix gather_rows(const DenseMatrix& h, std::span<const NodeId> rows) {
  DenseMatrix out(rows.size(), h.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = h.row(rows[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

}  // namespace

std::vector<int> LinearProbe::predict(const DenseMatrix& h) const {
  return argmax_rows(linear_forward(linear, h));
}

LinearProbe fit_linear_probe(const DenseMatrix& h, std::span<const int> labels,
                             std::span<const NodeId> train, std::size_t num_classes,
                             const ProbeConfig& config) {
  if (train.empty()) throw_invalid("linear_probe: empty training mask");
  if (num_classes < 2) throw_invalid("linear_probe: need at least two classes");
  std::vector<int> y(train.size());
  std::vector<char> present(num_classes, 0);
  for (std::size_t r = 0; r < train.size(); ++r) {
    if (train[r] >= labels.size()) throw_invalid("linear_probe: mask index out of range");
    const int label = labels[train[r]];
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes)
      throw_invalid("linear_probe: training node " + std::to_string(train[r]) + " has no valid label");
    y[r] = label;
    present[static_cast<std::size_t>(label)] = 1;
  }
  for (std::size_t c = 0; c < num_classes; ++c)
    if (!present[c]) throw_invalid("linear_probe: class " + std::to_string(c) + " absent from training mask");

  const DenseMatrix x = gather_rows(h, train);
  Rng rng(config.seed);
  LinearProbe probe{glorot_linear(h.cols(), num_classes, rng)};
  std::vector<DenseMatrix*> params{&probe.linear.weight, &probe.linear.bias};
  AdamState adam = make_adam_state(std::vector<const DenseMatrix*>{params.begin(), params.end()},
                                   AdamConfig{config.lr});
  const double n = static_cast<double>(train.size());
  for (unsigned epoch = 0; epoch < config.epochs; ++epoch) {
    DenseMatrix grad = softmax_rows(linear_forward(probe.linear, x));
    for (std::size_t r = 0; r < y.size(); ++r) grad(r, static_cast<std::size_t>(y[r])) -= 1.0;
    for (double& v : grad.values()) v /= n;
    DenseMatrix gw = matmul_tn(x, grad);
    if (config.weight_decay > 0.0) axpy(config.weight_decay, probe.linear.weight, gw);
    const DenseMatrix gb = column_sums(grad);
    const std::vector<const DenseMatrix*> grads{&gw, &gb};
    adam_step(params, grads, adam);
  }
  return probe;
}

double linear_probe(const DenseMatrix& h, std::span<const int> labels, const SplitMasks& masks,
                    const ProbeConfig& config) {
  if (labels.size() != h.rows()) throw_invalid("linear_probe: label count differs from rows");
  if (masks.test.empty()) throw_invalid("linear_probe: empty test mask");
  int top = -1;
  for (NodeId v : masks.train) top = std::max(top, labels[v]);
  for (NodeId v : masks.test) top = std::max(top, labels[v]);
  const LinearProbe probe =
      fit_linear_probe(h, labels, masks.train, static_cast<std::size_t>(top + 1), config);
  const auto predicted = probe.predict(gather_rows(h, masks.test));
  std::vector<int> truth(masks.test.size());
  for (std::size_t r = 0; r < masks.test.size(); ++r) truth[r] = labels[masks.test[r]];
  return accuracy(predicted, truth);
}

DenseMatrix standardize_columns(const DenseMatrix& h, std::span<const NodeId> fit_rows) {
  if (fit_rows.empty()) throw_invalid("standardize_columns: no rows to fit");
  const std::size_t cols = h.cols();
  std::vector<double> mean(cols, 0.0), var(cols, 0.0);
  for (NodeId r : fit_rows)
    for (std::size_t c = 0; c < cols; ++c) mean[c] += h(r, c);
  for (double& m : mean) m /= static_cast<double>(fit_rows.size());
  for (NodeId r : fit_rows)
    for (std::size_t c = 0; c < cols; ++c) var[c] += (h(r, c) - mean[c]) * (h(r, c) - mean[c]);
  DenseMatrix out(h.rows(), cols);
  for (std::size_t c = 0; c < cols; ++c) {
    const double sd = std::sqrt(var[c] / static_cast<double>(fit_rows.size()));
    const double scale = sd > 0.0 ? 1.0 / sd : 0.0;  // constant columns carry no signal
    for (std::size_t r = 0; r < h.rows(); ++r) out(r, c) = (h(r, c) - mean[c]) * scale;
  }
  return out;
}

double cross_validated_probe(const DenseMatrix& h, std::span<const int> labels, unsigned folds,
                             const ProbeConfig& config, Rng& rng) {
  if (folds < 2 || folds > h.rows()) throw_invalid("cross_validated_probe: bad fold count");
  std::vector<NodeId> order(h.rows());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  int top = -1;
  for (int l : labels) top = std::max(top, l);
  double total = 0.0;
  for (unsigned f = 0; f < folds; ++f) {
    SplitMasks masks;
    for (std::size_t i = 0; i < order.size(); ++i)
      (i % folds == f ? masks.test : masks.train).push_back(order[i]);
    const DenseMatrix scaled = standardize_columns(h, masks.train);
    const LinearProbe probe =
        fit_linear_probe(scaled, labels, masks.train, static_cast<std::size_t>(top + 1), config);
    const auto predicted = probe.predict(gather_rows(scaled, masks.test));
    std::vector<int> truth(masks.test.size());
    for (std::size_t r = 0; r < masks.test.size(); ++r) truth[r] = labels[masks.test[r]];
    total += accuracy(predicted, truth);
  }
  return total / folds;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double link_logit(const DenseMatrix& h, NodeId i, NodeId j) {
  const auto a = h.row(i);
  const auto b = h.row(j);
  double dot = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) dot += a[c] * b[c];
  return dot;
}

double link_score(const DenseMatrix& h, NodeId i, NodeId j) { return sigmoid(link_logit(h, i, j)); }

std::vector<double> link_scores(const DenseMatrix& h, std::span<const NodePair> pairs) {
  std::vector<double> out(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) out[p] = link_score(h, pairs[p].first, pairs[p].second);
  return out;
}

std::vector<double> link_logits(const DenseMatrix& h, std::span<const NodePair> pairs) {
  std::vector<double> out(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) out[p] = link_logit(h, pairs[p].first, pairs[p].second);
  return out;
}

RankingMetrics ranking_metrics(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw_invalid("ranking_metrics: size mismatch");
  const std::size_t n = scores.size();
  std::size_t positives = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw_invalid("ranking_metrics: labels must be 0 or 1");
    positives += static_cast<std::size_t>(l);
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw_invalid("ranking_metrics: both classes must be present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  // AUC via average ranks (Mann-Whitney U).
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k)
      if (labels[order[k]] == 1) positive_rank_sum += avg_rank;
    i = j + 1;
  }
  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;

  RankingMetrics metrics;
  metrics.auc = u / (p * static_cast<double>(negatives));

  // AP: descending score, ties by original index.
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  double precision_sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < n; ++rank) {
    if (labels[order[rank]] != 1) continue;
    ++hits;
    precision_sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
  }
  metrics.ap = precision_sum / p;
  return metrics;
}

DenseMatrix global_add_pool(const DenseMatrix& h, std::span<const std::size_t> graph_ids,
                            std::size_t num_graphs) {
  if (graph_ids.size() != h.rows()) throw_invalid("global_add_pool: one graph id per node required");
  DenseMatrix out(num_graphs, h.cols());
  for (std::size_t i = 0; i < h.rows(); ++i) {
    if (graph_ids[i] >= num_graphs) throw_invalid("global_add_pool: graph id out of range");
    auto dst = out.row(graph_ids[i]);
    const auto src = h.row(i);
    for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
  }
  return out;
}

DenseMatrix inject_noise(const DenseMatrix& x, NoiseKind kind, double level, Rng& rng) {
  if (!(level >= 0.0)) throw_invalid("inject_noise: level must be non-negative");
  DenseMatrix out = x;
  if (level == 0.0) return out;
  switch (kind) {
    case NoiseKind::kGaussian: {
      std::normal_distribution<double> noise(0.0, level);
      for (double& v : out.values()) v += noise(rng);
      return out;
    }
    case NoiseKind::kLaplace: {
      // Difference of two i.i.d. exponentials with mean `level`.
      std::exponential_distribution<double> expo(1.0 / level);
      for (double& v : out.values()) v += expo(rng) - expo(rng);
      return out;
    }
  }
  throw_invalid("inject_noise: unknown noise kind");
}

std::vector<NodePair> sample_non_edges(const Graph& graph, std::size_t count, Rng& rng) {
  const std::size_t n = graph.num_nodes();
  const std::size_t available = n < 2 ? 0 : n * (n - 1) / 2 - graph.num_edges();
  if (count > available) throw_invalid("sample_non_edges: not enough disconnected pairs");
  std::vector<NodePair> out;
  if (count == 0) return out;
  if (available <= 2 * count) {
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = i + 1; j < n; ++j)
        if (!graph.has_edge(i, j)) out.push_back({i, j});
    for (std::size_t k = 0; k < count; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, out.size() - 1);
      std::swap(out[k], out[pick(rng)]);
    }
    out.resize(count);
    return out;
  }
  std::unordered_set<std::uint64_t> chosen;
  std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(n - 1));
  while (out.size() < count) {
    const NodeId u = node(rng);
    const NodeId v = node(rng);
    if (u == v) continue;
    const NodePair p = make_pair_canonical(u, v);
    if (graph.has_edge(p.first, p.second) || !chosen.insert(key(p)).second) continue;
    out.push_back(p);
  }
  return out;
}

TemporalDelta temporal_delta(const Graph& prev, const Graph& next, Rng& rng) {
  if (prev.num_nodes() != next.num_nodes())
    throw_invalid("temporal_delta: snapshots have different node counts");
  TemporalDelta out;
  std::vector<std::pair<NodePair, int>> all;
  std::vector<NodePair> union_edges = prev.edges();
  std::size_t added = 0;
  for (const auto& e : prev.edges()) {
    if (next.has_edge(e.first, e.second)) {
      all.emplace_back(e, static_cast<int>(PairType::kKeepConnected));
    } else {
      all.emplace_back(e, static_cast<int>(PairType::kRemove));
      out.delta.push_back({e.first, e.second, -1});
    }
  }
  for (const auto& e : next.edges()) {
    if (prev.has_edge(e.first, e.second)) continue;
    all.emplace_back(e, static_cast<int>(PairType::kAdd));
    out.delta.push_back({e.first, e.second, +1});
    union_edges.push_back(e);
    ++added;
  }
  const Graph both = build_graph(union_edges, prev.num_nodes());
  const std::size_t n = prev.num_nodes();
  const std::size_t available = n < 2 ? 0 : n * (n - 1) / 2 - both.num_edges();
  const std::size_t wanted =
      std::min(prev.num_edges() > added ? prev.num_edges() - added : 0, available);
  for (const auto& p : sample_non_edges(both, wanted, rng))
    all.emplace_back(p, static_cast<int>(PairType::kKeepDisconnected));

  std::sort(all.begin(), all.end());
  std::sort(out.delta.begin(), out.delta.end());
  for (const auto& [p, label] : all) {
    out.labeled.pairs.push_back(p);
    out.labeled.labels.push_back(label);
  }
  return out;
}

EquivarianceReport equivariance_report(const SgcParams& params, const Graph& graph,
                                       const Graph& transformed, const DenseMatrix& x,
                                       std::span<const SignedPair> delta_estimate) {
  if (params.order != 1) throw_invalid("equivariance_report: requires an order-1 SGC encoder");
  if (graph.num_nodes() != transformed.num_nodes() || x.rows() != graph.num_nodes())
    throw_invalid("equivariance_report: shape mismatch");
  EquivarianceReport report;
  report.h = sgc_forward(params, normalized_adjacency(graph), x);
  report.h_transformed = sgc_forward(params, normalized_adjacency(transformed), x);
  const auto inv_sqrt = inverse_sqrt_degrees(transformed);
  const SparseMatrix delta =
      scale_sparse(symmetric_from_pairs(delta_estimate, graph.num_nodes()), inv_sqrt, inv_sqrt);
  report.delta_h_estimated = matmul(spmm(delta, x), params.linear.weight);
  report.reconstructed = report.h;
  axpy(1.0, report.delta_h_estimated, report.reconstructed);
  const double numerator = frobenius_norm(subtract(report.reconstructed, report.h_transformed));
  const double denominator = frobenius_norm(subtract(report.h_transformed, report.h));
  if (denominator == 0.0) {
    report.residual = numerator == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    report.residual = numerator / denominator;
  }
  return report;
}

double link_bce(const DenseMatrix& h, std::span<const NodePair> positives,
                std::span<const NodePair> negatives, DenseMatrix* grad_h) {
  const std::size_t total = positives.size() + negatives.size();
  if (total == 0) throw_invalid("link_bce: no pairs");
  if (grad_h != nullptr) *grad_h = DenseMatrix(h.rows(), h.cols());
  double loss = 0.0;
  auto visit = [&](std::span<const NodePair> pairs, double target) {
    for (const auto& p : pairs) {
      const double z = link_logit(h, p.first, p.second);
      const double s = sigmoid(z);
      // -log sigmoid(z) = softplus(-z), -log(1 - sigmoid(z)) = softplus(z)
      const double m = target == 1.0 ? -z : z;
      loss += std::max(m, 0.0) + std::log1p(std::exp(-std::abs(m)));
      if (grad_h == nullptr) continue;
      const double g = (s - target) / static_cast<double>(total);
      auto gi = grad_h->row(p.first);
      auto gj = grad_h->row(p.second);
      const auto hi = h.row(p.first);
      const auto hj = h.row(p.second);
      for (std::size_t c = 0; c < hi.size(); ++c) {
        gi[c] += g * hj[c];
        gj[c] += g * hi[c];
      }
    }
  };
  visit(positives, 1.0);
  visit(negatives, 0.0);
  return loss / static_cast<double>(total);
}

EncoderParams fine_tune_link(EncoderParams encoder, const Graph& train_graph,
                             const DenseMatrix& x, const LinkTrainConfig& config, Rng& rng) {
  const GraphOperators ops = GraphOperators::build(train_graph);
  auto params = parameter_tensors(encoder);
  AdamState adam = make_adam_state(std::vector<const DenseMatrix*>(params.begin(), params.end()),
                                   AdamConfig{config.lr});
  for (unsigned epoch = 0; epoch < config.epochs; ++epoch) {
    const auto negatives = sample_non_edges(train_graph, train_graph.num_edges(), rng);
    EncoderTape tape;
    const DenseMatrix h = encode(encoder, ops, x, &tape);
    DenseMatrix grad_h;
    const double loss = link_bce(h, train_graph.edges(), negatives, &grad_h);
    if (!std::isfinite(loss)) throw_numerical("fine_tune_link: non-finite loss");
    EncoderParams grads = zeros_like(encoder);
    encode_backward(encoder, ops, tape, grad_h, grads);
    adam_step(params, parameter_tensors(std::as_const(grads)), adam);
  }
  return encoder;
}

}  // namespace topoxform
