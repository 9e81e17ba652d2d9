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
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "topoxform/decoder.hpp"
#include "topoxform/encoder.hpp"
#include "topoxform/transform.hpp"

namespace topoxform {

// Encoder plus transformation-type decoder.
struct Model {
  EncoderParams encoder;
  DecoderParams decoder;
};

Model init_model(const EncoderSpec& spec, Rng& rng);
Model zeros_like(const Model& model);
std::vector<DenseMatrix*> parameter_tensors(Model& model);
std::vector<const DenseMatrix*> parameter_tensors(const Model& model);

std::size_t count_parameters(const Model& model);
// SGC encoder with bias plus the four-way linear decoder.
std::uint64_t sgc_parameter_count(std::uint64_t in_channels, std::uint64_t out_channels);

// One supervised (original, transformed) pair of graphs.
struct TrainingBatch {
  std::shared_ptr<const GraphOperators> original;
  std::shared_ptr<const GraphOperators> transformed;
  std::shared_ptr<const DenseMatrix> features;
  LabeledPairs pairs;
};

struct BackwardResult {
  double loss = 0.0;
  double type_accuracy = 0.0;
  Model gradients;
};

// Loss of the composed encode -> diff -> edge_repr -> linear -> softmax-CE map.
double forward_loss(const Model& model, const TrainingBatch& batch);

// Loss and exact gradients for every parameter.
BackwardResult backward(const Model& model, const TrainingBatch& batch);
BackwardResult backward(const Model& model, const Graph& graph, const Graph& transformed,
                        const DenseMatrix& x, const LabeledPairs& pairs);

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<DenseMatrix> first_moment;
  std::vector<DenseMatrix> second_moment;
  std::uint64_t step = 0;
};

AdamState make_adam_state(std::span<const DenseMatrix* const> params, const AdamConfig& config);
void adam_step(std::span<DenseMatrix* const> params, std::span<const DenseMatrix* const> grads,
               AdamState& state);

struct TrainConfig {
  double rate = 0.7;
  double lr = 1e-4;
  unsigned max_epochs = 1000;
  unsigned patience = 20;
};

struct EpochRecord {
  unsigned epoch = 0;
  double loss = 0.0;
  double type_acc = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  bool diverged = false;
  bool early_stopped = false;
  unsigned best_epoch = 0;
};

struct TrainResult {
  Model model;  // parameters at the lowest-loss epoch
  TrainHistory history;
};

// Produces the batches of one epoch; called once per epoch.
using BatchSource = std::function<std::vector<TrainingBatch>(Rng&)>;

// Fresh sampled transformation of a single graph every epoch.
BatchSource single_graph_source(const Graph& graph, std::shared_ptr<const DenseMatrix> features,
                                double rate);

// Early stopping on the training loss with the given patience. A non-finite loss
// stops training with history.diverged set.
TrainResult pretrain(const TrainConfig& config, Model initial, const BatchSource& source, Rng& rng);

// Type accuracy of the model on one batch.
double type_accuracy(const Model& model, const TrainingBatch& batch);

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // entries whose +-h step crosses an activation kink
};

// Denominator floor for relative errors of near-zero gradient entries. Central
// differences at h=1e-5 carry ~1e-11 roundoff on an O(1) loss, so smaller floors
// turn noise on vanishing gradients into spurious failures.
inline constexpr double kGradCheckFloor = 1e-5;

// |a - n| / max(|a|, |n|, kGradCheckFloor)
double relative_error(double analytic, double numeric);

// Central differences of forward_loss against backward, over every parameter.
// Entries where a perturbation flips the sign of any ReLU input are skipped:
// the loss is not differentiable across that boundary.
GradCheckResult grad_check(const Model& model, const TrainingBatch& batch, double h);

// Generic central-difference check of f at params against the analytic gradient.
// When given, same_piece() is evaluated at both perturbed points and a false
// result skips the entry.
GradCheckResult finite_difference_check(std::span<double> params, std::span<const double> analytic,
                                        const std::function<double()>& f, double h,
                                        const std::function<bool()>& same_piece = {});

// Signs of every pre-activation that feeds a ReLU, on both graphs of the batch.
std::vector<bool> activation_pattern(const Model& model, const TrainingBatch& batch);

}  // namespace topoxform
