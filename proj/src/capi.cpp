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

#include "topoxform/topoxform.h"

#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <string>
#include <utility>

#include "topoxform/error.hpp"
#include "topoxform/pipeline.hpp"

namespace tx = topoxform;

struct tx_dataset {
  tx::Dataset data;
};
struct tx_collection {
  tx::GraphCollection data;
};
struct tx_model {
  tx::EncoderSpec spec;
  tx::Model model;
};
struct tx_history {
  tx::TrainHistory data;
};

namespace {

thread_local std::string g_last_error;

tx_status fail(tx_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs f, translating exceptions into status codes.
template <typename F>
tx_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const tx::Error& e) {
    switch (e.kind()) {
      case tx::ErrorKind::kInvalidArgument:
        return fail(TX_ERR_USAGE, e.what());
      case tx::ErrorKind::kData:
        return fail(TX_ERR_DATA, e.what());
      case tx::ErrorKind::kNumerical:
        return fail(TX_ERR_NUMERIC, e.what());
    }
    return fail(TX_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TX_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TX_ERR_INTERNAL, e.what());
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) tx::throw_invalid(std::string(what) + " must not be null");
}

tx::EncoderSpec to_spec(const tx_encoder_config& c, std::size_t in_channels) {
  tx::EncoderSpec spec;
  switch (c.kind) {
    case TX_ENCODER_SGC:
      spec.kind = tx::EncoderKind::kSgc;
      break;
    case TX_ENCODER_GCN:
      spec.kind = tx::EncoderKind::kGcn;
      break;
    case TX_ENCODER_GIN:
      spec.kind = tx::EncoderKind::kGin;
      break;
    default:
      tx::throw_invalid("unknown encoder kind " + std::to_string(c.kind));
  }
  spec.in_channels = c.in_channels != 0 ? c.in_channels : in_channels;
  spec.hidden_channels = c.hidden_channels;
  spec.out_channels = c.out_channels;
  spec.order = c.order;
  spec.layers = c.layers;
  spec.slope = c.slope;
  spec.eps = c.eps;
  return spec;
}

tx::TrainConfig to_train(const tx_train_config& c) {
  tx::TrainConfig t;
  t.rate = c.rate;
  t.lr = c.lr;
  t.max_epochs = c.max_epochs;
  t.patience = c.patience;
  if (!(c.rate >= 0.0 && c.rate <= 1.0)) tx::throw_invalid("rate must lie in [0, 1]");
  if (!(c.lr > 0.0)) tx::throw_invalid("learning rate must be positive");
  if (c.patience < 1) tx::throw_invalid("patience must be at least 1");
  return t;
}

tx::ProbeConfig to_probe(const tx_probe_config& c) {
  tx::ProbeConfig p;
  p.lr = c.lr;
  p.epochs = c.epochs;
  p.weight_decay = c.weight_decay;
  return p;
}

void emit_history(tx_history** out, const tx::TrainHistory& history) {
  if (out != nullptr) *out = new tx_history{history};
}

tx_status training_status(const tx::TrainHistory& history) {
  if (history.diverged) return fail(TX_ERR_NUMERIC, "training diverged: non-finite loss");
  return TX_OK;
}

}  // namespace

extern "C" {

const char* tx_last_error(void) { return g_last_error.c_str(); }

const char* tx_version(void) { return "0.1.0"; }

void tx_encoder_config_default(tx_encoder_config* config) {
  if (config == nullptr) return;
  const tx::EncoderSpec spec;
  *config = {TX_ENCODER_SGC, 0, spec.hidden_channels, spec.out_channels, spec.order,
             spec.layers,    spec.slope, spec.eps};
}

void tx_train_config_default(tx_train_config* config) {
  if (config == nullptr) return;
  const tx::TrainConfig t;
  *config = {t.rate, t.lr, t.max_epochs, t.patience, 1};
}

void tx_probe_config_default(tx_probe_config* config) {
  if (config == nullptr) return;
  const tx::ProbeConfig p;
  *config = {p.lr, p.epochs, p.weight_decay, 0.1};
}

void tx_finetune_config_default(tx_finetune_config* config) {
  if (config == nullptr) return;
  const tx::LinkTrainConfig f;
  *config = {f.lr, f.epochs};
}

void tx_sbm_config_default(tx_sbm_config* config) {
  if (config == nullptr) return;
  const tx::SbmSpec s;
  *config = {s.block_size, s.blocks, s.p_in, s.p_out, s.feature_dim, s.feature_shift, 0.0};
}

tx_status tx_dataset_generate_sbm(const tx_sbm_config* config, uint64_t seed, tx_dataset** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    tx::SbmSpec spec{config->block_size, config->blocks, config->p_in,
                     config->p_out,      config->feature_dim, config->feature_shift};
    if (config->drift < 0.0 || config->drift > 1.0) tx::throw_invalid("drift must lie in [0, 1]");
    tx::Rng rng = tx::make_rng(seed, tx::kStreamData);
    auto ds = std::make_unique<tx_dataset>();
    ds->data = tx::generate_sbm(spec, rng);
    if (config->drift > 0.0)
      ds->data.temporal.push_back(tx::drift_sbm(ds->data.graph, ds->data.labels, spec, config->drift, rng));
    *out = ds.release();
    return TX_OK;
  });
}

tx_status tx_dataset_load(const char* dir, tx_dataset** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    auto ds = std::make_unique<tx_dataset>();
    ds->data = tx::load_citation_dataset(dir);
    *out = ds.release();
    return TX_OK;
  });
}

tx_status tx_dataset_save(const tx_dataset* dataset, const char* dir) {
  return guarded([&] {
    require(dataset, "dataset");
    require(dir, "dir");
    tx::write_dataset(dir, dataset->data);
    return TX_OK;
  });
}

tx_status tx_dataset_info_get(const tx_dataset* dataset, tx_dataset_info* out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    const tx::Dataset& d = dataset->data;
    *out = {d.graph.num_nodes(), d.graph.num_edges(), d.features.cols(), d.num_classes(),
            d.splits.has_value() ? 1 : 0, d.temporal.empty() ? 0 : 1};
    return TX_OK;
  });
}

tx_status tx_dataset_add_noise(tx_dataset* dataset, int kind, double level, uint64_t seed) {
  return guarded([&] {
    require(dataset, "dataset");
    tx::NoiseKind nk;
    if (kind == TX_NOISE_GAUSSIAN)
      nk = tx::NoiseKind::kGaussian;
    else if (kind == TX_NOISE_LAPLACE)
      nk = tx::NoiseKind::kLaplace;
    else
      tx::throw_invalid("unknown noise kind " + std::to_string(kind));
    tx::Rng rng = tx::make_rng(seed, tx::kStreamNoise);
    dataset->data.features = tx::inject_noise(dataset->data.features, nk, level, rng);
    return TX_OK;
  });
}

void tx_dataset_free(tx_dataset* dataset) { delete dataset; }

tx_status tx_collection_generate(size_t num_graphs, size_t min_nodes, size_t max_nodes,
                                 size_t feature_dim, uint64_t seed, tx_collection** out) {
  return guarded([&] {
    require(out, "out");
    tx::Rng rng = tx::make_rng(seed, tx::kStreamData);
    auto c = std::make_unique<tx_collection>();
    c->data = tx::generate_graph_collection(num_graphs, min_nodes, max_nodes, feature_dim, rng);
    *out = c.release();
    return TX_OK;
  });
}

tx_status tx_collection_load(const char* dir, tx_collection** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    auto c = std::make_unique<tx_collection>();
    c->data = tx::load_graph_collection(dir);
    *out = c.release();
    return TX_OK;
  });
}

tx_status tx_collection_save(const tx_collection* collection, const char* dir) {
  return guarded([&] {
    require(collection, "collection");
    require(dir, "dir");
    tx::write_graph_collection(dir, collection->data);
    return TX_OK;
  });
}

tx_status tx_collection_size(const tx_collection* collection, size_t* graphs, size_t* classes) {
  return guarded([&] {
    require(collection, "collection");
    if (graphs != nullptr) *graphs = collection->data.graphs.size();
    if (classes != nullptr) *classes = collection->data.num_classes();
    return TX_OK;
  });
}

void tx_collection_free(tx_collection* collection) { delete collection; }

tx_status tx_model_init(const tx_encoder_config* config, uint64_t seed, tx_model** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    if (config->in_channels == 0) tx::throw_invalid("model init needs in_channels");
    auto m = std::make_unique<tx_model>();
    m->spec = to_spec(*config, 0);
    tx::Rng rng = tx::make_rng(seed, tx::kStreamInit);
    m->model = tx::init_model(m->spec, rng);
    *out = m.release();
    return TX_OK;
  });
}

tx_status tx_model_load(const tx_encoder_config* config, const char* path, tx_model** out) {
  return guarded([&] {
    require(config, "config");
    require(path, "path");
    require(out, "out");
    if (config->in_channels == 0) tx::throw_invalid("model load needs in_channels");
    auto m = std::make_unique<tx_model>();
    m->spec = to_spec(*config, 0);
    tx::Rng rng(0);
    m->model = tx::init_model(m->spec, rng);
    std::ifstream in(path, std::ios::binary);
    if (!in) tx::throw_data(std::string(path) + ": cannot open");
    std::vector<tx::DenseMatrix> tensors = tx::read_checkpoint(in);
    auto params = tx::parameter_tensors(m->model);
    if (tensors.size() != params.size())
      tx::throw_data(std::string(path) + ": checkpoint holds " + std::to_string(tensors.size()) +
                     " tensors, architecture needs " + std::to_string(params.size()));
    for (std::size_t t = 0; t < params.size(); ++t) {
      if (!tensors[t].same_shape(*params[t]))
        tx::throw_data(std::string(path) + ": tensor " + std::to_string(t) + " shape mismatch");
      *params[t] = std::move(tensors[t]);
    }
    *out = m.release();
    return TX_OK;
  });
}

tx_status tx_model_save(const tx_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    std::ofstream out(path, std::ios::binary);
    if (!out) tx::throw_data(std::string(path) + ": cannot write");
    const auto params = tx::parameter_tensors(model->model);
    tx::write_checkpoint(out, params);
    return TX_OK;
  });
}

tx_status tx_model_parameter_count(const tx_model* model, uint64_t* out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = tx::count_parameters(model->model);
    return TX_OK;
  });
}

void tx_model_free(tx_model* model) { delete model; }

uint64_t tx_sgc_parameter_count(uint64_t in_channels, uint64_t out_channels) {
  return tx::sgc_parameter_count(in_channels, out_channels);
}

tx_status tx_history_summary_get(const tx_history* history, tx_history_summary* out) {
  return guarded([&] {
    require(history, "history");
    require(out, "out");
    const tx::TrainHistory& h = history->data;
    *out = {h.epochs.size(), h.diverged ? 1 : 0, h.early_stopped ? 1 : 0, h.best_epoch};
    return TX_OK;
  });
}

tx_status tx_history_epoch(const tx_history* history, size_t index, tx_epoch_record* out) {
  return guarded([&] {
    require(history, "history");
    require(out, "out");
    if (index >= history->data.epochs.size()) tx::throw_invalid("history index out of range");
    const tx::EpochRecord& r = history->data.epochs[index];
    *out = {r.epoch, r.loss, r.type_acc};
    return TX_OK;
  });
}

void tx_history_free(tx_history* history) { delete history; }

tx_status tx_pretrain(const tx_dataset* dataset, const tx_encoder_config* encoder,
                      const tx_train_config* train, tx_model** model_out, tx_history** history_out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(encoder, "encoder");
    require(train, "train");
    require(model_out, "model_out");
    const tx::Dataset& d = dataset->data;
    auto m = std::make_unique<tx_model>();
    m->spec = to_spec(*encoder, d.features.cols());
    if (m->spec.in_channels != d.features.cols())
      tx::throw_invalid("encoder in_channels does not match the dataset");
    const tx::TrainConfig tc = to_train(*train);
    tx::Rng init_rng = tx::make_rng(train->seed, tx::kStreamInit);
    tx::Rng train_rng = tx::make_rng(train->seed, tx::kStreamTrain);
    const auto features = std::make_shared<const tx::DenseMatrix>(d.features);
    tx::TrainResult result = tx::pretrain(tc, tx::init_model(m->spec, init_rng),
                                          tx::single_graph_source(d.graph, features, tc.rate), train_rng);
    m->model = std::move(result.model);
    emit_history(history_out, result.history);
    *model_out = m.release();
    return training_status(result.history);
  });
}

tx_status tx_type_accuracy(const tx_model* model, const tx_dataset* dataset, double rate,
                           uint64_t seed, double* out) {
  return guarded([&] {
    require(model, "model");
    require(dataset, "dataset");
    require(out, "out");
    tx::Rng rng = tx::make_rng(seed, tx::kStreamEval);
    const auto features = std::make_shared<const tx::DenseMatrix>(dataset->data.features);
    const auto batches = tx::single_graph_source(dataset->data.graph, features, rate)(rng);
    *out = tx::type_accuracy(model->model, batches.front());
    return TX_OK;
  });
}

tx_status tx_probe(const tx_model* model, const tx_dataset* dataset, const tx_probe_config* probe,
                   uint64_t seed, double* accuracy) {
  return guarded([&] {
    require(model, "model");
    require(dataset, "dataset");
    require(probe, "probe");
    require(accuracy, "accuracy");
    tx::ProbeConfig pc = to_probe(*probe);
    pc.seed = tx::make_rng(seed, tx::kStreamProbe)();
    *accuracy = tx::probe_encoder(model->model.encoder, dataset->data, probe->feature_slope, pc);
    return TX_OK;
  });
}

tx_status tx_run_linkpred(const tx_dataset* dataset, const tx_encoder_config* encoder,
                          const tx_train_config* train, const tx_finetune_config* finetune,
                          int pretrain, tx_link_result* out, tx_history** history_out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(encoder, "encoder");
    require(train, "train");
    require(finetune, "finetune");
    require(out, "out");
    tx::LinkTaskConfig cfg;
    cfg.encoder = to_spec(*encoder, dataset->data.features.cols());
    cfg.train = to_train(*train);
    cfg.finetune.lr = finetune->lr;
    cfg.finetune.epochs = finetune->epochs;
    cfg.pretrain = pretrain != 0;
    cfg.seed = train->seed;
    const tx::LinkTaskResult r = tx::run_link_prediction(dataset->data, cfg);
    emit_history(history_out, r.train.history);
    *out = {r.val.auc, r.val.ap, r.test.auc, r.test.ap, r.train_edges};
    return training_status(r.train.history);
  });
}

tx_status tx_run_temporal(const tx_dataset* dataset, const tx_encoder_config* encoder,
                          const tx_train_config* train, int pretrain, tx_temporal_result* out,
                          tx_history** history_out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(encoder, "encoder");
    require(train, "train");
    require(out, "out");
    const tx::Dataset& d = dataset->data;
    if (d.temporal.empty()) tx::throw_data("temporal task needs a second snapshot (edges_next.txt)");
    tx::TemporalTaskConfig cfg;
    cfg.encoder = to_spec(*encoder, d.features.cols());
    cfg.train = to_train(*train);
    cfg.pretrain = pretrain != 0;
    cfg.seed = train->seed;
    const tx::TemporalTaskResult r = tx::run_temporal(d.graph, d.temporal.front(), d.features, cfg);
    emit_history(history_out, r.train.history);
    *out = {r.test.auc, r.test.ap, r.added, r.removed};
    return training_status(r.train.history);
  });
}

tx_status tx_run_graphclass(const tx_collection* collection, const tx_encoder_config* encoder,
                            const tx_train_config* train, size_t batch_size,
                            const tx_probe_config* probe, unsigned folds, int pretrain,
                            double* accuracy, tx_history** history_out) {
  return guarded([&] {
    require(collection, "collection");
    require(encoder, "encoder");
    require(train, "train");
    require(probe, "probe");
    require(accuracy, "accuracy");
    if (collection->data.graphs.empty()) tx::throw_data("graph collection is empty");
    tx::GraphTaskConfig cfg;
    cfg.encoder = to_spec(*encoder, collection->data.graphs.front().features.cols());
    cfg.train = to_train(*train);
    cfg.batch_size = batch_size;
    cfg.probe = to_probe(*probe);
    cfg.folds = folds;
    cfg.pretrain = pretrain != 0;
    cfg.seed = train->seed;
    const tx::GraphTaskResult r = tx::run_graph_classification(collection->data, cfg);
    emit_history(history_out, r.train.history);
    *accuracy = r.accuracy;
    return training_status(r.train.history);
  });
}

tx_status tx_run_equivariance(const tx_dataset* dataset, size_t channels, const tx_train_config* train,
                              const char* dump_dir, tx_equivariance_result* out,
                              tx_history** history_out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(train, "train");
    require(out, "out");
    const tx::Dataset& d = dataset->data;
    if (d.temporal.empty()) tx::throw_data("equivariance report needs a second snapshot (edges_next.txt)");
    tx::EquivarianceTaskConfig cfg;
    cfg.channels = channels;
    cfg.train = to_train(*train);
    cfg.seed = train->seed;
    const tx::EquivarianceTaskResult r = tx::run_equivariance(d.graph, d.temporal.front(), d.features, cfg);
    emit_history(history_out, r.train.history);
    if (r.train.history.diverged) return training_status(r.train.history);
    if (dump_dir != nullptr) {
      const std::filesystem::path dir(dump_dir);
      std::filesystem::create_directories(dir);
      tx::write_matrix_csv(dir / "h.csv", r.estimated.h);
      tx::write_matrix_csv(dir / "h_transformed.csv", r.estimated.h_transformed);
      tx::write_matrix_csv(dir / "delta_h_estimated.csv", r.estimated.delta_h_estimated);
      tx::write_matrix_csv(dir / "h_plus_delta.csv", r.estimated.reconstructed);
    }
    *out = {r.type_accuracy, r.estimated.residual, r.truth.residual, r.delta_estimate.size()};
    return TX_OK;
  });
}

tx_status tx_run_gradcheck(size_t nodes, size_t channels, uint64_t seed, double h,
                           tx_gradcheck_result* out) {
  return guarded([&] {
    require(out, "out");
    if (!(h > 0.0)) tx::throw_invalid("step h must be positive");
    const tx::GradCheckReport r = tx::run_gradcheck(nodes, channels, seed, h);
    *out = {r.sgc_order1, r.sgc_order2, r.gcn, r.gin, r.worst()};
    return TX_OK;
  });
}

}  // extern "C"
