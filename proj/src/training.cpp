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

#include "topoxform/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topoxform/error.hpp"

namespace topoxform {

Model init_model(const EncoderSpec& spec, Rng& rng) {
  Model model;
  model.encoder = init_encoder(spec, rng);
  model.decoder = init_decoder(encoder_out_channels(model.encoder), rng);
  return model;
}

Model zeros_like(const Model& model) {
  Model out{zeros_like(model.encoder), model.decoder};
  out.decoder.linear.weight.fill(0.0);
  out.decoder.linear.bias.fill(0.0);
  return out;
}

std::vector<DenseMatrix*> parameter_tensors(Model& model) {
  auto out = parameter_tensors(model.encoder);
  out.push_back(&model.decoder.linear.weight);
  out.push_back(&model.decoder.linear.bias);
  return out;
}

std::vector<const DenseMatrix*> parameter_tensors(const Model& model) {
  auto ptrs = parameter_tensors(const_cast<Model&>(model));
  return {ptrs.begin(), ptrs.end()};
}

std::size_t count_parameters(const Model& model) {
  std::size_t total = 0;
  for (const DenseMatrix* t : parameter_tensors(model)) total += t->size();
  return total;
}

std::uint64_t sgc_parameter_count(std::uint64_t in_channels, std::uint64_t out_channels) {
  return in_channels * out_channels + out_channels + out_channels * kNumPairTypes + kNumPairTypes;
}

namespace {

struct DecoderPass {
  DenseMatrix h;
  DenseMatrix h_transformed;
  DenseMatrix delta;
  DenseMatrix edges;
  DenseMatrix probs;
  EncoderTape tape;
  EncoderTape tape_transformed;
};

DecoderPass run_forward(const Model& model, const TrainingBatch& batch, bool keep_tapes) {
  if (batch.pairs.size() == 0) throw_invalid("training batch has no pairs");
  DecoderPass pass;
  pass.h = encode(model.encoder, *batch.original, *batch.features,
                  keep_tapes ? &pass.tape : nullptr);
  pass.h_transformed = encode(model.encoder, *batch.transformed, *batch.features,
                              keep_tapes ? &pass.tape_transformed : nullptr);
  pass.delta = feature_diff(pass.h_transformed, pass.h);
  pass.edges = edge_repr(pass.delta, batch.pairs.pairs);
  pass.probs = predict_types(model.decoder, pass.edges);
  return pass;
}

}  // namespace

double forward_loss(const Model& model, const TrainingBatch& batch) {
  const DecoderPass pass = run_forward(model, batch, false);
  return ce_loss(pass.probs, batch.pairs.labels);
}

double type_accuracy(const Model& model, const TrainingBatch& batch) {
  const DecoderPass pass = run_forward(model, batch, false);
  return accuracy(argmax_rows(pass.probs), batch.pairs.labels);
}

BackwardResult backward(const Model& model, const TrainingBatch& batch) {
  DecoderPass pass = run_forward(model, batch, true);
  const auto& labels = batch.pairs.labels;
  const auto& pairs = batch.pairs.pairs;
  const std::size_t num_pairs = pairs.size();
  const std::size_t f = pass.delta.cols();

  BackwardResult result;
  result.loss = ce_loss(pass.probs, labels);
  result.type_accuracy = accuracy(argmax_rows(pass.probs), labels);
  result.gradients = zeros_like(model);
  if (!std::isfinite(result.loss)) throw_numerical("backward: non-finite loss");

  // Softmax cross-entropy: d loss / d logits = (p - onehot) / P.
  DenseMatrix grad_logits = pass.probs;
  for (std::size_t p = 0; p < num_pairs; ++p) grad_logits(p, static_cast<std::size_t>(labels[p])) -= 1.0;
  for (double& v : grad_logits.values()) v /= static_cast<double>(num_pairs);

  LinearLayer& dec_grad = result.gradients.decoder.linear;
  dec_grad.weight = matmul_tn(pass.edges, grad_logits);
  dec_grad.bias = column_sums(grad_logits);
  const DenseMatrix grad_edges = matmul_nt(grad_logits, model.decoder.linear.weight);

  // e = u / |u|_1 with u = exp(-d*d):  dL/dd_c = -2 d_c e_c (g_c - <g, e>).
  DenseMatrix grad_delta(pass.delta.rows(), f);
  for (std::size_t p = 0; p < num_pairs; ++p) {
    const auto hi = pass.delta.row(pairs[p].first);
    const auto hj = pass.delta.row(pairs[p].second);
    const auto e = pass.edges.row(p);
    const auto g = grad_edges.row(p);
    double mass = 0.0;
    for (std::size_t c = 0; c < f; ++c) {
      const double d = hi[c] - hj[c];
      mass += std::exp(-d * d);
    }
    if (mass < kEdgeReprUnderflow) continue;  // uniform fallback is constant
    double inner = 0.0;
    for (std::size_t c = 0; c < f; ++c) inner += g[c] * e[c];
    auto gi = grad_delta.row(pairs[p].first);
    auto gj = grad_delta.row(pairs[p].second);
    for (std::size_t c = 0; c < f; ++c) {
      const double d = hi[c] - hj[c];
      const double gd = -2.0 * d * e[c] * (g[c] - inner);
      gi[c] += gd;
      gj[c] -= gd;
    }
  }

  // delta = H~ - H.
  encode_backward(model.encoder, *batch.transformed, pass.tape_transformed, grad_delta,
                  result.gradients.encoder);
  for (double& v : grad_delta.values()) v = -v;
  encode_backward(model.encoder, *batch.original, pass.tape, grad_delta, result.gradients.encoder);

  for (const DenseMatrix* t : parameter_tensors(result.gradients)) {
    if (!all_finite(*t)) throw_numerical("backward: non-finite gradient");
  }
  return result;
}

BackwardResult backward(const Model& model, const Graph& graph, const Graph& transformed,
                        const DenseMatrix& x, const LabeledPairs& pairs) {
  TrainingBatch batch;
  batch.original = std::make_shared<GraphOperators>(GraphOperators::build(graph));
  batch.transformed = std::make_shared<GraphOperators>(GraphOperators::build(transformed));
  batch.features = std::make_shared<DenseMatrix>(x);
  batch.pairs = pairs;
  return backward(model, batch);
}

AdamState make_adam_state(std::span<const DenseMatrix* const> params, const AdamConfig& config) {
  AdamState state;
  state.config = config;
  for (const DenseMatrix* p : params) {
    state.first_moment.emplace_back(p->rows(), p->cols());
    state.second_moment.emplace_back(p->rows(), p->cols());
  }
  return state;
}

void adam_step(std::span<DenseMatrix* const> params, std::span<const DenseMatrix* const> grads,
               AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size())
    throw_invalid("adam_step: tensor count mismatch");
  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->same_shape(*grads[i]) || !params[i]->same_shape(state.first_moment[i]))
      throw_invalid("adam_step: shape mismatch");
    auto theta = params[i]->values();
    const auto g = grads[i]->values();
    auto m = state.first_moment[i].values();
    auto v = state.second_moment[i].values();
    for (std::size_t k = 0; k < theta.size(); ++k) {
      m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * g[k];
      v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * g[k] * g[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      theta[k] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
  }
}

BatchSource single_graph_source(const Graph& graph, std::shared_ptr<const DenseMatrix> features,
                                double rate) {
  if (features->rows() != graph.num_nodes())
    throw_invalid("single_graph_source: feature rows differ from node count");
  auto original = std::make_shared<const GraphOperators>(GraphOperators::build(graph));
  return [graph, features, original, rate](Rng& rng) {
    TransformDraw draw = draw_transform(graph, rate, rng);
    TrainingBatch batch;
    batch.original = original;
    batch.transformed =
        std::make_shared<const GraphOperators>(GraphOperators::build(draw.result.transformed));
    batch.features = features;
    batch.pairs = std::move(draw.labeled);
    return std::vector<TrainingBatch>{std::move(batch)};
  };
}

TrainResult pretrain(const TrainConfig& config, Model initial, const BatchSource& source, Rng& rng) {
  if (!(config.rate >= 0.0 && config.rate <= 1.0)) throw_invalid("pretrain: rate must lie in [0, 1]");
  if (config.patience < 1) throw_invalid("pretrain: patience must be at least 1");
  if (!(config.lr > 0.0)) throw_invalid("pretrain: learning rate must be positive");

  TrainResult result;
  result.model = initial;
  Model current = std::move(initial);
  auto params = parameter_tensors(current);
  AdamState adam = make_adam_state(
      std::vector<const DenseMatrix*>(params.begin(), params.end()), AdamConfig{config.lr});

  double best_loss = std::numeric_limits<double>::infinity();
  unsigned stale = 0;
  for (unsigned epoch = 0; epoch < config.max_epochs; ++epoch) {
    const std::vector<TrainingBatch> batches = source(rng);
    double loss_sum = 0.0;
    double acc_sum = 0.0;
    std::size_t pair_total = 0;
    Model epoch_start = current;
    bool diverged = false;
    for (const TrainingBatch& batch : batches) {
      BackwardResult step;
      try {
        step = backward(current, batch);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNumerical) throw;
        diverged = true;
        break;
      }
      const double weight = static_cast<double>(batch.pairs.size());
      loss_sum += step.loss * weight;
      acc_sum += step.type_accuracy * weight;
      pair_total += batch.pairs.size();
      const auto grads = parameter_tensors(step.gradients);
      adam_step(params, grads, adam);
    }
    const double loss = pair_total ? loss_sum / static_cast<double>(pair_total)
                                   : std::numeric_limits<double>::quiet_NaN();
    if (diverged || !std::isfinite(loss)) {
      result.history.diverged = true;
      result.history.epochs.push_back({epoch, loss, pair_total ? acc_sum / pair_total : 0.0});
      break;
    }
    result.history.epochs.push_back({epoch, loss, acc_sum / static_cast<double>(pair_total)});
    if (loss < best_loss) {
      best_loss = loss;
      stale = 0;
      // Losses are measured before each epoch's updates.
      result.model = std::move(epoch_start);
      result.history.best_epoch = epoch;
    } else if (++stale >= config.patience) {
      result.history.early_stopped = true;
      break;
    }
  }
  return result;
}

double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), kGradCheckFloor});
  return std::abs(analytic - numeric) / scale;
}

GradCheckResult finite_difference_check(std::span<double> params, std::span<const double> analytic,
                                        const std::function<double()>& f, double h,
                                        const std::function<bool()>& same_piece) {
  if (params.size() != analytic.size()) throw_invalid("finite_difference_check: size mismatch");
  GradCheckResult result;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = f();
    bool smooth = !same_piece || same_piece();
    params[i] = saved - h;
    const double down = f();
    smooth = smooth && (!same_piece || same_piece());
    params[i] = saved;
    if (!smooth) {
      ++result.skipped;
      continue;
    }
    const double numeric = (up - down) / (2.0 * h);
    result.max_relative_error = std::max(result.max_relative_error, relative_error(analytic[i], numeric));
    ++result.checked;
  }
  return result;
}

std::vector<bool> activation_pattern(const Model& model, const TrainingBatch& batch) {
  std::vector<bool> signs;
  auto collect = [&](const GraphOperators& ops) {
    EncoderTape tape;
    encode(model.encoder, ops, *batch.features, &tape);
    const std::size_t depth = tape.layers.size();
    const bool gcn = std::holds_alternative<GcnStack>(model.encoder);
    const bool gin = std::holds_alternative<GinStack>(model.encoder);
    for (std::size_t l = 0; l < depth; ++l) {
      const auto& layer = tape.layers[l];
      if (gin)
        for (double v : layer.hidden_pre.values()) signs.push_back(v > 0.0);
      if ((gcn || gin) && l + 1 < depth)
        for (double v : layer.output_pre.values()) signs.push_back(v > 0.0);
    }
  };
  collect(*batch.original);
  collect(*batch.transformed);
  return signs;
}

GradCheckResult grad_check(const Model& model, const TrainingBatch& batch, double h) {
  const BackwardResult analytic = backward(model, batch);
  Model probe = model;
  auto params = parameter_tensors(probe);
  const auto grads = parameter_tensors(analytic.gradients);
  const std::vector<bool> base = activation_pattern(model, batch);
  const auto same_piece = [&] { return activation_pattern(probe, batch) == base; };
  GradCheckResult total;
  for (std::size_t t = 0; t < params.size(); ++t) {
    const GradCheckResult r = finite_difference_check(
        params[t]->values(), grads[t]->values(), [&] { return forward_loss(probe, batch); }, h,
        base.empty() ? std::function<bool()>{} : std::function<bool()>(same_piece));
    total.max_relative_error = std::max(total.max_relative_error, r.max_relative_error);
    total.checked += r.checked;
    total.skipped += r.skipped;
  }
  return total;
}

}  // namespace topoxform
