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

#include <algorithm>
#include <numeric>

#include "topoxform/error.hpp"

namespace topoxform {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

double probe_encoder(const EncoderParams& encoder, const Dataset& dataset, double feature_slope,
                     const ProbeConfig& probe) {
  if (dataset.labels.empty() || !dataset.splits)
    throw_data("node classification needs labels and splits");
  const GraphOperators ops = GraphOperators::build(dataset.graph);
  const DenseMatrix h = leaky_relu(encode(encoder, ops, dataset.features), feature_slope);
  return linear_probe(h, dataset.labels, *dataset.splits, probe);
}

NodeTaskResult run_node_classification(const Dataset& dataset, const NodeTaskConfig& config) {
  if (dataset.labels.empty() || !dataset.splits)
    throw_data("node classification needs labels and splits");
  EncoderSpec spec = config.encoder;
  spec.in_channels = dataset.features.cols();
  Rng init_rng = make_rng(config.seed, kStreamInit);
  NodeTaskResult result;
  result.train.model = init_model(spec, init_rng);
  if (config.pretrain) {
    Rng train_rng = make_rng(config.seed, kStreamTrain);
    const auto features = std::make_shared<const DenseMatrix>(dataset.features);
    result.train = pretrain(config.train, result.train.model,
                            single_graph_source(dataset.graph, features, config.train.rate), train_rng);
    if (result.train.history.diverged) return result;
  }
  ProbeConfig probe = config.probe;
  probe.seed = make_rng(config.seed, kStreamProbe)();
  result.accuracy = probe_encoder(result.train.model.encoder, dataset, config.feature_slope, probe);
  return result;
}

namespace {

RankingMetrics score_split(const DenseMatrix& h, std::span<const NodePair> positives,
                           std::span<const NodePair> negatives) {
  std::vector<double> scores = link_logits(h, positives);
  const auto neg = link_logits(h, negatives);
  scores.insert(scores.end(), neg.begin(), neg.end());
  std::vector<int> labels(positives.size(), 1);
  labels.resize(positives.size() + negatives.size(), 0);
  return ranking_metrics(scores, labels);
}

}  // namespace

LinkTaskResult run_link_prediction(const Dataset& dataset, const LinkTaskConfig& config) {
  Rng split_rng = make_rng(config.seed, kStreamSplit);
  const LinkSplit split = link_split(dataset.graph, split_rng);
  const Graph train_graph = build_graph(split.train_edges, dataset.graph.num_nodes());

  EncoderSpec spec = config.encoder;
  spec.in_channels = dataset.features.cols();
  Rng init_rng = make_rng(config.seed, kStreamInit);
  LinkTaskResult result;
  result.train_edges = train_graph.num_edges();
  result.train.model = init_model(spec, init_rng);
  if (config.pretrain) {
    Rng train_rng = make_rng(config.seed, kStreamTrain);
    const auto features = std::make_shared<const DenseMatrix>(dataset.features);
    result.train = pretrain(config.train, result.train.model,
                            single_graph_source(train_graph, features, config.train.rate), train_rng);
    if (result.train.history.diverged) return result;
  }
  Rng ft_rng = make_rng(config.seed, kStreamFineTune);
  const EncoderParams tuned =
      fine_tune_link(result.train.model.encoder, train_graph, dataset.features, config.finetune, ft_rng);
  const DenseMatrix h = encode(tuned, GraphOperators::build(train_graph), dataset.features);
  result.val = score_split(h, split.val_edges, split.val_neg);
  result.test = score_split(h, split.test_edges, split.test_neg);
  return result;
}

TemporalTaskResult run_temporal(const Graph& prev, const Graph& next, const DenseMatrix& x,
                                const TemporalTaskConfig& config) {
  if (prev.num_nodes() != next.num_nodes() || x.rows() != prev.num_nodes())
    throw_invalid("run_temporal: snapshot / feature sizes differ");
  EncoderSpec spec = config.encoder;
  spec.in_channels = x.cols();
  Rng init_rng = make_rng(config.seed, kStreamInit);
  TemporalTaskResult result;
  result.train.model = init_model(spec, init_rng);

  auto prev_ops = std::make_shared<const GraphOperators>(GraphOperators::build(prev));
  auto next_ops = std::make_shared<const GraphOperators>(GraphOperators::build(next));
  auto features = std::make_shared<const DenseMatrix>(x);
  {
    Rng probe_rng(0);
    const TemporalDelta td = temporal_delta(prev, next, probe_rng);
    for (const auto& d : td.delta) (d.sign > 0 ? result.added : result.removed)++;
  }
  if (config.pretrain) {
    BatchSource source = [&](Rng& rng) {
      TrainingBatch batch{prev_ops, next_ops, features, temporal_delta(prev, next, rng).labeled};
      return std::vector<TrainingBatch>{std::move(batch)};
    };
    Rng train_rng = make_rng(config.seed, kStreamTrain);
    result.train = pretrain(config.train, result.train.model, source, train_rng);
    if (result.train.history.diverged) return result;
  }
  Rng eval_rng = make_rng(config.seed, kStreamEval);
  const DenseMatrix h = encode(result.train.model.encoder, *prev_ops, x);
  const auto negatives = sample_non_edges(next, next.num_edges(), eval_rng);
  result.test = score_split(h, next.edges(), negatives);
  return result;
}

GraphBatch make_graph_batch(const GraphCollection& collection, std::span<const std::size_t> members) {
  GraphBatch batch;
  std::size_t total = 0;
  std::size_t channels = 0;
  for (std::size_t g : members) {
    total += collection.graphs.at(g).graph.num_nodes();
    channels = collection.graphs[g].features.cols();
  }
  batch.features = DenseMatrix(total, channels);
  std::vector<NodePair> edges;
  NodeId offset = 0;
  for (std::size_t k = 0; k < members.size(); ++k) {
    const LabeledGraph& lg = collection.graphs[members[k]];
    if (lg.features.cols() != channels) throw_data("graph collection: inconsistent feature widths");
    batch.offsets.push_back(offset);
    for (const auto& e : lg.graph.edges()) edges.push_back({e.first + offset, e.second + offset});
    for (NodeId i = 0; i < lg.graph.num_nodes(); ++i) {
      const auto src = lg.features.row(i);
      std::copy(src.begin(), src.end(), batch.features.row(offset + i).begin());
      batch.graph_ids.push_back(k);
    }
    offset += static_cast<NodeId>(lg.graph.num_nodes());
  }
  batch.graph = build_graph(edges, total);
  return batch;
}

GraphTaskResult run_graph_classification(const GraphCollection& collection,
                                         const GraphTaskConfig& config) {
  if (collection.graphs.empty()) throw_data("graph classification: empty collection");
  if (config.batch_size == 0) throw_invalid("graph classification: batch size must be positive");
  EncoderSpec spec = config.encoder;
  spec.in_channels = collection.graphs.front().features.cols();
  Rng init_rng = make_rng(config.seed, kStreamInit);
  GraphTaskResult result;
  result.train.model = init_model(spec, init_rng);

  if (config.pretrain) {
    const double rate = config.train.rate;
    BatchSource source = [&](Rng& rng) {
      std::vector<std::size_t> order(collection.graphs.size());
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<TrainingBatch> batches;
      for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
        const std::size_t stop = std::min(order.size(), start + config.batch_size);
        const std::span<const std::size_t> members(order.data() + start, stop - start);
        GraphBatch union_batch = make_graph_batch(collection, members);
        std::vector<NodePair> transformed_edges;
        LabeledPairs labeled;
        for (std::size_t k = 0; k < members.size(); ++k) {
          const Graph& g = collection.graphs[members[k]].graph;
          const NodeId off = union_batch.offsets[k];
          if (g.num_nodes() < 2 || g.num_edges() == 0) {
            for (const auto& e : g.edges()) transformed_edges.push_back({e.first + off, e.second + off});
            continue;
          }
          const TransformDraw draw = draw_transform(g, rate, rng);
          for (const auto& e : draw.result.transformed.edges())
            transformed_edges.push_back({e.first + off, e.second + off});
          for (std::size_t p = 0; p < draw.labeled.size(); ++p) {
            labeled.pairs.push_back({draw.labeled.pairs[p].first + off, draw.labeled.pairs[p].second + off});
            labeled.labels.push_back(draw.labeled.labels[p]);
          }
        }
        if (labeled.size() == 0) continue;
        TrainingBatch batch;
        batch.original = std::make_shared<const GraphOperators>(GraphOperators::build(union_batch.graph));
        batch.transformed = std::make_shared<const GraphOperators>(
            GraphOperators::build(build_graph(transformed_edges, union_batch.graph.num_nodes())));
        batch.features = std::make_shared<const DenseMatrix>(std::move(union_batch.features));
        batch.pairs = std::move(labeled);
        batches.push_back(std::move(batch));
      }
      return batches;
    };
    Rng train_rng = make_rng(config.seed, kStreamTrain);
    result.train = pretrain(config.train, result.train.model, source, train_rng);
    if (result.train.history.diverged) return result;
  }

  std::vector<std::size_t> all(collection.graphs.size());
  std::iota(all.begin(), all.end(), 0);
  const GraphBatch everything = make_graph_batch(collection, all);
  const DenseMatrix h =
      encode(result.train.model.encoder, GraphOperators::build(everything.graph), everything.features);
  const DenseMatrix pooled = global_add_pool(h, everything.graph_ids, collection.graphs.size());
  std::vector<int> labels;
  for (const auto& g : collection.graphs) labels.push_back(g.label);
  ProbeConfig probe = config.probe;
  probe.seed = make_rng(config.seed, kStreamProbe)();
  Rng fold_rng = make_rng(config.seed, kStreamEval);
  result.accuracy = cross_validated_probe(pooled, labels, config.folds, probe, fold_rng);
  return result;
}

std::vector<SignedPair> estimate_delta(const Model& model, const TrainingBatch& batch) {
  const DenseMatrix h = encode(model.encoder, *batch.original, *batch.features);
  const DenseMatrix ht = encode(model.encoder, *batch.transformed, *batch.features);
  const auto predicted =
      argmax_rows(predict_types(model.decoder, edge_repr(feature_diff(ht, h), batch.pairs.pairs)));
  std::vector<SignedPair> out;
  for (std::size_t p = 0; p < predicted.size(); ++p) {
    const NodePair pair = batch.pairs.pairs[p];
    if (predicted[p] == static_cast<int>(PairType::kAdd)) out.push_back({pair.first, pair.second, +1});
    if (predicted[p] == static_cast<int>(PairType::kRemove)) out.push_back({pair.first, pair.second, -1});
  }
  return out;
}

EquivarianceTaskResult run_equivariance(const Graph& prev, const Graph& next, const DenseMatrix& x,
                                        const EquivarianceTaskConfig& config) {
  if (prev.num_nodes() != next.num_nodes() || x.rows() != prev.num_nodes())
    throw_invalid("run_equivariance: snapshot / feature sizes differ");
  EncoderSpec spec;
  spec.kind = EncoderKind::kSgc;
  spec.order = 1;
  spec.in_channels = x.cols();
  spec.out_channels = config.channels;
  Rng init_rng = make_rng(config.seed, kStreamInit);
  EquivarianceTaskResult result;
  result.train.model = init_model(spec, init_rng);

  auto prev_ops = std::make_shared<const GraphOperators>(GraphOperators::build(prev));
  auto next_ops = std::make_shared<const GraphOperators>(GraphOperators::build(next));
  auto features = std::make_shared<const DenseMatrix>(x);
  BatchSource source = [&](Rng& rng) {
    TrainingBatch batch{prev_ops, next_ops, features, temporal_delta(prev, next, rng).labeled};
    return std::vector<TrainingBatch>{std::move(batch)};
  };
  Rng train_rng = make_rng(config.seed, kStreamTrain);
  result.train = pretrain(config.train, result.train.model, source, train_rng);
  if (result.train.history.diverged) return result;

  Rng eval_rng = make_rng(config.seed, kStreamEval);
  const TemporalDelta td = temporal_delta(prev, next, eval_rng);
  const TrainingBatch batch{prev_ops, next_ops, features, td.labeled};
  result.type_accuracy = type_accuracy(result.train.model, batch);
  result.delta_estimate = estimate_delta(result.train.model, batch);
  const auto& sgc = std::get<SgcParams>(result.train.model.encoder);
  result.estimated = equivariance_report(sgc, prev, next, x, result.delta_estimate);
  result.truth = equivariance_report(sgc, prev, next, x, td.delta);
  return result;
}

double GradCheckReport::worst() const { return std::max({sgc_order1, sgc_order2, gcn, gin}); }

Graph erdos_renyi(std::size_t nodes, double p, Rng& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<NodePair> edges;
  for (NodeId i = 0; i < nodes; ++i)
    for (NodeId j = i + 1; j < nodes; ++j)
      if (coin(rng)) edges.push_back({i, j});
  return build_graph(edges, nodes);
}

GradCheckReport run_gradcheck(std::size_t nodes, std::size_t channels, std::uint64_t seed, double h) {
  if (nodes < 4 || nodes > 50) throw_invalid("gradcheck: node count must lie in [4, 50]");
  if (channels < 1 || channels > 16) throw_invalid("gradcheck: channel count must lie in [1, 16]");
  Rng data_rng = make_rng(seed, kStreamData);
  const Graph graph = erdos_renyi(nodes, std::min(1.0, 4.0 / static_cast<double>(nodes - 1)), data_rng);
  constexpr std::size_t kInputChannels = 5;
  DenseMatrix x(nodes, kInputChannels);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : x.values()) v = normal(data_rng);
  const TransformDraw draw = draw_transform(graph, 0.5, data_rng);

  TrainingBatch batch;
  batch.original = std::make_shared<const GraphOperators>(GraphOperators::build(graph));
  batch.transformed = std::make_shared<const GraphOperators>(GraphOperators::build(draw.result.transformed));
  batch.features = std::make_shared<const DenseMatrix>(x);
  batch.pairs = draw.labeled;

  auto check = [&](EncoderSpec spec) {
    spec.in_channels = kInputChannels;
    spec.out_channels = channels;
    spec.hidden_channels = channels;
    Rng init_rng = make_rng(seed, kStreamInit);
    const Model model = init_model(spec, init_rng);
    return grad_check(model, batch, h).max_relative_error;
  };
  GradCheckReport report;
  report.sgc_order1 = check({EncoderKind::kSgc, 0, 0, 0, 1, 1, 0.0, 0.0});
  report.sgc_order2 = check({EncoderKind::kSgc, 0, 0, 0, 2, 1, 0.0, 0.0});
  report.gcn = check({EncoderKind::kGcn, 0, 0, 0, 1, 2, 0.0, 0.0});
  report.gin = check({EncoderKind::kGin, 0, 0, 0, 1, 1, 0.0, 0.0});
  return report;
}

}  // namespace topoxform
