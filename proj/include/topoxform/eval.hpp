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
#include <span>
#include <vector>

#include "topoxform/data_io.hpp"
#include "topoxform/dense.hpp"
#include "topoxform/encoder.hpp"
#include "topoxform/graph.hpp"
#include "topoxform/transform.hpp"

namespace topoxform {

struct ProbeConfig {
  double lr = 0.01;
  unsigned epochs = 300;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
};

// Softmax regression on frozen features.
struct LinearProbe {
  LinearLayer linear;

  std::vector<int> predict(const DenseMatrix& h) const;
};

// Trains on rows `train` using only labels[train]. Throws if some class in
// [0, num_classes) has no training example.
LinearProbe fit_linear_probe(const DenseMatrix& h, std::span<const int> labels,
                             std::span<const NodeId> train, std::size_t num_classes,
                             const ProbeConfig& config);

// Test accuracy of a probe fitted on masks.train.
double linear_probe(const DenseMatrix& h, std::span<const int> labels, const SplitMasks& masks,
                    const ProbeConfig& config);

// Column z-scores with statistics from fit_rows only, applied to every row.
DenseMatrix standardize_columns(const DenseMatrix& h, std::span<const NodeId> fit_rows);

// Mean held-out accuracy over `folds` random (unstratified) folds; features are
// standardized per fold.
double cross_validated_probe(const DenseMatrix& h, std::span<const int> labels, unsigned folds,
                             const ProbeConfig& config, Rng& rng);

double sigmoid(double x);
// sigmoid(h_i . h_j)
double link_score(const DenseMatrix& h, NodeId i, NodeId j);
std::vector<double> link_scores(const DenseMatrix& h, std::span<const NodePair> pairs);

// h_i . h_j. Ranks identically to link_score but does not saturate, so ranking
// metrics are computed on logits.
double link_logit(const DenseMatrix& h, NodeId i, NodeId j);
std::vector<double> link_logits(const DenseMatrix& h, std::span<const NodePair> pairs);

struct RankingMetrics {
  double auc = 0.0;
  double ap = 0.0;
};

// AUC with ties counted 1/2; AP as the mean precision at each positive's rank
// (descending score, ties by original index).
RankingMetrics ranking_metrics(std::span<const double> scores, std::span<const int> labels);

// Row g is the sum of node rows with graph id g; graphs without nodes give zero rows.
DenseMatrix global_add_pool(const DenseMatrix& h, std::span<const std::size_t> graph_ids,
                            std::size_t num_graphs);

enum class NoiseKind { kGaussian, kLaplace };
DenseMatrix inject_noise(const DenseMatrix& x, NoiseKind kind, double level, Rng& rng);

struct TemporalDelta {
  std::vector<SignedPair> delta;  // next - prev
  LabeledPairs labeled;
};

// Transformation labels between consecutive snapshots. Keep-disconnected pairs
// are a random sample of persisting non-edges of size max(0, M_prev - #added),
// capped by availability.
TemporalDelta temporal_delta(const Graph& prev, const Graph& next, Rng& rng);

struct EquivarianceReport {
  double residual = 0.0;  // ||H + dH_est - H~||_F / ||H~ - H||_F
  DenseMatrix h;
  DenseMatrix h_transformed;
  DenseMatrix delta_h_estimated;
  DenseMatrix reconstructed;  // H + dH_est
};

// dH_est = D~^{-1/2} dA_est D~^{-1/2} X W for an order-1 SGC encoder.
EquivarianceReport equivariance_report(const SgcParams& params, const Graph& graph,
                                       const Graph& transformed, const DenseMatrix& x,
                                       std::span<const SignedPair> delta_estimate);

struct LinkTrainConfig {
  double lr = 0.01;
  unsigned epochs = 200;
};

// Mean binary cross-entropy of sigmoid(h_i . h_j) and its gradient w.r.t. h.
double link_bce(const DenseMatrix& h, std::span<const NodePair> positives,
                std::span<const NodePair> negatives, DenseMatrix* grad_h);

// Inner-product-decoder fine-tuning on the edges of train_graph with an equal
// number of freshly sampled non-edges each epoch.
EncoderParams fine_tune_link(EncoderParams encoder, const Graph& train_graph,
                             const DenseMatrix& x, const LinkTrainConfig& config, Rng& rng);

// Distinct uniformly drawn non-edges of graph.
std::vector<NodePair> sample_non_edges(const Graph& graph, std::size_t count, Rng& rng);

}  // namespace topoxform
