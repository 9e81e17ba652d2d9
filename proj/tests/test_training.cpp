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

#include <gtest/gtest.h>

#include "test_helpers.hpp"
#include "topoxform/data_io.hpp"
#include "topoxform/error.hpp"

namespace topoxform {
namespace {

using testing::random_graph;
using testing::random_matrix;

TrainingBatch make_batch(const Graph& g, const DenseMatrix& x, double rate, Rng& rng) {
  return single_graph_source(g, std::make_shared<const DenseMatrix>(x), rate)(rng).front();
}

EncoderSpec small_spec(EncoderKind kind, std::size_t in, unsigned order = 1, unsigned layers = 2) {
  EncoderSpec spec;
  spec.kind = kind;
  spec.in_channels = in;
  spec.hidden_channels = 8;
  spec.out_channels = 8;
  spec.order = order;
  spec.layers = layers;
  return spec;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

TEST(ParameterCountTest, PublishedConfigurations) {
  EXPECT_EQ(sgc_parameter_count(1433, 512), 736260u);
  EXPECT_EQ(sgc_parameter_count(500, 256), 129284u);

  EncoderSpec spec;
  spec.in_channels = 1433;
  spec.out_channels = 512;
  Rng rng(1);
  EXPECT_EQ(count_parameters(init_model(spec, rng)), 736260u);
}

TEST(ParameterCountTest, EmptyModelHasNone) {
  EXPECT_EQ(count_parameters(Model{GcnStack{}, DecoderParams{}}), 0u);
}

TEST(BackwardTest, ZeroDecoderBiasGradient) {
  Rng rng(2);
  const Graph g = random_graph(15, 0.3, rng);
  const DenseMatrix x = random_matrix(15, 3, rng);
  const TrainingBatch batch = make_batch(g, x, 0.5, rng);
  Model model = init_model(small_spec(EncoderKind::kSgc, 3), rng);
  model.decoder = zero_decoder(8);

  const BackwardResult r = backward(model, batch);
  EXPECT_NEAR(r.loss, std::log(4.0), 1e-15);
  std::vector<double> expected(4, 0.25);
  for (int l : batch.pairs.labels) expected[static_cast<std::size_t>(l)] -= 1.0 / batch.pairs.size();
  for (std::size_t c = 0; c < 4; ++c)
    EXPECT_NEAR(r.gradients.decoder.linear.bias(0, c), expected[c], 1e-15);
}

TEST(BackwardTest, LossMatchesForward) {
  Rng rng(3);
  const Graph g = random_graph(20, 0.2, rng);
  const DenseMatrix x = random_matrix(20, 4, rng);
  const TrainingBatch batch = make_batch(g, x, 0.5, rng);
  const Model model = init_model(small_spec(EncoderKind::kGcn, 4), rng);
  EXPECT_EQ(backward(model, batch).loss, forward_loss(model, batch));
}

TEST(GradCheckTest, LinearFunctionIsExact) {
  std::vector<double> params{0.5, -1.5, 2.0};
  const std::vector<double> coeffs{3.0, -2.0, 0.25};
  const auto f = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += coeffs[i] * params[i];
    return s;
  };
  const GradCheckResult r = finite_difference_check(params, coeffs, f, 1e-5);
  EXPECT_LT(r.max_relative_error, 1e-9);
  EXPECT_EQ(r.checked, 3u);
}

TEST(GradCheckTest, AllEncodersOnRandomInstances) {
  struct Case {
    EncoderKind kind;
    unsigned order;
    unsigned layers;
  };
  const Case cases[] = {{EncoderKind::kSgc, 1, 1},
                        {EncoderKind::kSgc, 2, 1},
                        {EncoderKind::kGcn, 1, 2},
                        {EncoderKind::kGin, 1, 1}};
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Rng rng(seed);
    const Graph g = random_graph(20, 0.2, rng);
    const DenseMatrix x = random_matrix(20, 5, rng);
    const TrainingBatch batch = make_batch(g, x, 0.5, rng);
    for (const Case& c : cases) {
      const Model model = init_model(small_spec(c.kind, 5, c.order, c.layers), rng);
      const GradCheckResult r = grad_check(model, batch, 1e-5);
      EXPECT_LT(r.max_relative_error, 1e-5)
          << "seed " << seed << " kind " << static_cast<int>(c.kind) << " order " << c.order;
      EXPECT_GT(r.checked, count_parameters(model) / 2);
    }
  }
}

TEST(GradCheckTest, SmallerStepIsMoreAccurate) {
  Rng rng(4);
  const Graph g = random_graph(20, 0.2, rng);
  const DenseMatrix x = random_matrix(20, 5, rng);
  const TrainingBatch batch = make_batch(g, x, 0.5, rng);
  const Model model = init_model(small_spec(EncoderKind::kSgc, 5, 2), rng);
  EXPECT_LT(grad_check(model, batch, 1e-5).max_relative_error,
            grad_check(model, batch, 1e-3).max_relative_error);
}

TEST(AdamTest, SingleScalarStep) {
  DenseMatrix theta(1, 1, 0.0);
  const DenseMatrix grad(1, 1, 1.0);
  std::vector<DenseMatrix*> params{&theta};
  std::vector<const DenseMatrix*> grads{&grad};
  AdamState state = make_adam_state(grads, AdamConfig{1e-3});
  adam_step(params, grads, state);
  // lr * m_hat / (sqrt(v_hat) + eps) with m_hat = v_hat = 1.
  EXPECT_NEAR(theta(0, 0), -1e-3 / (1.0 + 1e-8), 1e-18);
  EXPECT_NEAR(theta(0, 0), -9.99999995e-4, 1e-11);
  EXPECT_EQ(state.step, 1u);
}

TEST(AdamTest, ZeroGradientLeavesParameters) {
  DenseMatrix theta{{1.0, -2.0}};
  const DenseMatrix grad(1, 2, 0.0);
  std::vector<DenseMatrix*> params{&theta};
  std::vector<const DenseMatrix*> grads{&grad};
  AdamState state = make_adam_state(grads, AdamConfig{});
  adam_step(params, grads, state);
  EXPECT_EQ(theta, (DenseMatrix{{1.0, -2.0}}));
}

TEST(AdamTest, RejectsShapeMismatch) {
  DenseMatrix theta(1, 2);
  const DenseMatrix grad(2, 1);
  std::vector<DenseMatrix*> params{&theta};
  std::vector<const DenseMatrix*> grads{&grad};
  AdamState state = make_adam_state(std::vector<const DenseMatrix*>{&theta}, AdamConfig{});
  EXPECT_THROW(adam_step(params, grads, state), Error);
}

class PretrainTest : public ::testing::Test {
 protected:
  void SetUp() override {
    SbmSpec spec;
    spec.block_size = 30;
    Rng rng(5);
    data_ = generate_sbm(spec, rng);
    features_ = std::make_shared<const DenseMatrix>(data_.features);
    Rng init(6);
    model_ = init_model(small_spec(EncoderKind::kSgc, spec.feature_dim, 2), init);
  }

  TrainResult run(const TrainConfig& config, std::uint64_t seed = 7) {
    Rng rng(seed);
    return pretrain(config, model_, single_graph_source(data_.graph, features_, config.rate), rng);
  }

  Dataset data_;
  std::shared_ptr<const DenseMatrix> features_;
  Model model_;
};

TEST_F(PretrainTest, ZeroEpochsReturnsInitialModel) {
  TrainConfig config;
  config.max_epochs = 0;
  const TrainResult r = run(config);
  EXPECT_TRUE(r.history.epochs.empty());
  const auto a = parameter_tensors(r.model);
  const auto b = parameter_tensors(model_);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i], *b[i]);
}

TEST_F(PretrainTest, EarlyStoppingWaitsForPatience) {
  for (unsigned patience : {1u, 3u, 10u}) {
    TrainConfig config;
    config.lr = 1e-9;  // effectively frozen, so the loss only fluctuates
    config.max_epochs = 200;
    config.patience = patience;
    const TrainResult r = run(config);
    ASSERT_TRUE(r.history.early_stopped);
    const std::size_t stop = r.history.epochs.size() - 1;
    EXPECT_GE(stop, patience);
    EXPECT_EQ(stop - r.history.best_epoch, patience);
    for (std::size_t e = r.history.best_epoch + 1; e <= stop; ++e)
      EXPECT_GE(r.history.epochs[e].loss, r.history.epochs[r.history.best_epoch].loss);
  }
}

TEST_F(PretrainTest, LossDecreasesAndRunsAreBitIdentical) {
  TrainConfig config;
  config.rate = 0.5;
  config.lr = 0.05;
  config.max_epochs = 100;
  config.patience = 1000;
  const TrainResult a = run(config);
  const TrainResult b = run(config);
  ASSERT_EQ(a.history.epochs.size(), 100u);
  std::vector<double> early, late;
  for (const EpochRecord& e : a.history.epochs) (e.epoch < 50 ? early : late).push_back(e.loss);
  EXPECT_LT(median(late), median(early));

  ASSERT_EQ(b.history.epochs.size(), a.history.epochs.size());
  for (std::size_t i = 0; i < a.history.epochs.size(); ++i)
    EXPECT_EQ(a.history.epochs[i].loss, b.history.epochs[i].loss);
  const auto pa = parameter_tensors(a.model);
  const auto pb = parameter_tensors(b.model);
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(*pa[i], *pb[i]);
}

TEST_F(PretrainTest, NonFiniteFeaturesMarkDivergence) {
  DenseMatrix bad = data_.features;
  bad(0, 0) = std::numeric_limits<double>::infinity();
  TrainConfig config;
  config.max_epochs = 5;
  Rng rng(8);
  const TrainResult r =
      pretrain(config, model_,
               single_graph_source(data_.graph, std::make_shared<const DenseMatrix>(bad), 0.5), rng);
  EXPECT_TRUE(r.history.diverged);
  EXPECT_EQ(r.history.epochs.size(), 1u);
}

TEST_F(PretrainTest, RejectsBadConfig) {
  TrainConfig config;
  config.rate = 1.5;
  EXPECT_THROW(run(config), Error);
  config.rate = 0.5;
  config.lr = 0.0;
  EXPECT_THROW(run(config), Error);
  config.lr = 1e-3;
  config.patience = 0;
  EXPECT_THROW(run(config), Error);
}

}  // namespace
}  // namespace topoxform
