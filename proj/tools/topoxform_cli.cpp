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

// Command-line front end over the C API.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "topoxform/topoxform.h"

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Thrown to unwind with a status; message goes to stderr as one JSON line.
struct CliFailure {
  tx_status status;
  std::string message;
};

void check(tx_status status) {
  if (status != TX_OK) throw CliFailure{status, tx_last_error()};
}

[[noreturn]] void usage_error(const std::string& message) { throw CliFailure{TX_ERR_USAGE, message}; }

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};
using Dataset = Handle<tx_dataset, tx_dataset_free>;
using Collection = Handle<tx_collection, tx_collection_free>;
using Model = Handle<tx_model, tx_model_free>;
using History = Handle<tx_history, tx_history_free>;

const std::map<std::string, int> kEncoderKinds{
    {"sgc", TX_ENCODER_SGC}, {"gcn", TX_ENCODER_GCN}, {"gin", TX_ENCODER_GIN}};
const std::map<std::string, int> kNoiseKinds{{"gaussian", TX_NOISE_GAUSSIAN}, {"laplace", TX_NOISE_LAPLACE}};

struct EncoderOpts {
  std::string kind = "sgc";
  size_t channels_in = 0;
  size_t channels = 512;
  size_t hidden = 64;
  unsigned order = 2;
  unsigned layers = 2;
  double gcn_slope = 0.0;
  double gin_eps = 0.0;

  tx_encoder_config config() const {
    tx_encoder_config c;
    tx_encoder_config_default(&c);
    c.kind = kEncoderKinds.at(kind);
    c.in_channels = channels_in;
    c.out_channels = channels;
    c.hidden_channels = hidden;
    c.order = order;
    c.layers = layers;
    c.slope = gcn_slope;
    c.eps = gin_eps;
    return c;
  }
  json to_json() const {
    return {{"encoder", kind}, {"channels_in", channels_in}, {"channels", channels}, {"hidden", hidden},
            {"order", order},  {"layers", layers},           {"gcn_slope", gcn_slope}, {"gin_eps", gin_eps}};
  }
};

struct TrainOpts {
  double rate = 0.7;
  double lr = 1e-4;
  unsigned epochs = 1000;
  unsigned patience = 20;
  uint64_t seed = 1;

  tx_train_config config() const { return {rate, lr, epochs, patience, seed}; }
  json to_json() const {
    return {{"rate", rate}, {"lr", lr}, {"epochs", epochs}, {"patience", patience}, {"seed", seed}};
  }
};

struct DataOpts {
  std::string dataset;
  tx_sbm_config sbm{};
  std::string noise_kind = "gaussian";
  double noise_level = 0.0;
  std::vector<CLI::Option*> sbm_flags;

  json to_json() const {
    json j;
    if (!dataset.empty()) {
      j["dataset"] = dataset;
    } else {
      j["sbm"] = {{"block_size", sbm.block_size}, {"blocks", sbm.blocks},           {"p_in", sbm.p_in},
                  {"p_out", sbm.p_out},           {"features", sbm.feature_dim},    {"shift", sbm.feature_shift},
                  {"drift", sbm.drift}};
    }
    j["noise_kind"] = noise_kind;
    j["noise_level"] = noise_level;
    return j;
  }
};

struct Options {
  EncoderOpts encoder;
  TrainOpts train;
  DataOpts data;
  std::string out;

  // probe
  tx_probe_config probe{};
  std::string checkpoint;
  // link prediction
  tx_finetune_config finetune{};
  bool no_pretrain = false;
  // graph classification
  size_t batch_size = 64;
  unsigned folds = 10;
  size_t graphs = 200;
  size_t min_nodes = 12;
  size_t max_nodes = 30;
  size_t graph_features = 8;
  // gradcheck
  size_t nodes = 20;
  double step = 1e-5;
};

void add_encoder_flags(CLI::App* app, EncoderOpts& e) {
  app->add_option("--encoder", e.kind, "Encoder architecture")
      ->check(CLI::IsMember({"sgc", "gcn", "gin"}))
      ->capture_default_str();
  app->add_option("--channels,--channels-out", e.channels, "Output channels F")->capture_default_str();
  app->add_option("--channels-in", e.channels_in, "Input channels (0: from the data)")->capture_default_str();
  app->add_option("--hidden", e.hidden, "Hidden channels (GCN / GIN)")->capture_default_str();
  app->add_option("--order", e.order, "SGC propagation order k")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--layers", e.layers, "GCN / GIN depth")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--gcn-slope", e.gcn_slope, "Slope of the activation between GCN layers (0: ReLU)")
      ->capture_default_str();
  app->add_option("--gin-eps", e.gin_eps, "GIN epsilon")->capture_default_str();
}

void add_train_flags(CLI::App* app, TrainOpts& t) {
  app->add_option("--rate", t.rate, "Edge perturbation rate r")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  app->add_option("--lr", t.lr, "Adam learning rate")->capture_default_str();
  app->add_option("--epochs", t.epochs, "Maximum pretraining epochs")->capture_default_str();
  app->add_option("--patience", t.patience, "Early-stopping patience on the training loss")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--seed", t.seed, "Run seed")->capture_default_str();
}

void add_data_flags(CLI::App* app, DataOpts& d, bool with_noise) {
  app->add_option("--dataset", d.dataset, "Dataset directory (default: generated SBM)");
  d.sbm_flags = {
      app->add_option("--sbm-block-size", d.sbm.block_size, "SBM nodes per block")->capture_default_str(),
      app->add_option("--sbm-blocks", d.sbm.blocks, "SBM block count")->capture_default_str(),
      app->add_option("--sbm-p-in", d.sbm.p_in, "SBM intra-block edge probability")->capture_default_str(),
      app->add_option("--sbm-p-out", d.sbm.p_out, "SBM inter-block edge probability")->capture_default_str(),
      app->add_option("--sbm-features", d.sbm.feature_dim, "SBM feature dimension")->capture_default_str(),
      app->add_option("--sbm-shift", d.sbm.feature_shift, "SBM per-block feature mean shift")->capture_default_str(),
      app->add_option("--drift", d.sbm.drift, "Fraction of edges rewired for the second SBM snapshot")
          ->check(CLI::Range(0.0, 1.0))
          ->capture_default_str()};
  if (with_noise) {
    app->add_option("--noise-kind", d.noise_kind, "Additive feature noise distribution")
        ->check(CLI::IsMember({"gaussian", "laplace"}))
        ->capture_default_str();
    app->add_option("--noise-level", d.noise_level, "Noise standard deviation / Laplace scale")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
  }
}

void add_out_flag(CLI::App* app, std::string& out) {
  app->add_option("--out", out, "Output directory for metrics.json, history.jsonl and checkpoints");
}

void prepare_out(const std::string& out) {
  if (out.empty()) return;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw CliFailure{TX_ERR_DATA, out + ": cannot create output directory: " + ec.message()};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw CliFailure{TX_ERR_DATA, path.string() + ": write failed"};
}

// Loads or generates the dataset and applies feature noise.
void load_data(const Options& o, Dataset& ds, bool with_noise) {
  if (!o.data.dataset.empty()) {
    for (const CLI::Option* flag : o.data.sbm_flags)
      if (flag->count() > 0) usage_error("--dataset and " + flag->get_name() + " are mutually exclusive");
    check(tx_dataset_load(o.data.dataset.c_str(), ds.out()));
  } else {
    check(tx_dataset_generate_sbm(&o.data.sbm, o.train.seed, ds.out()));
  }
  if (with_noise && o.data.noise_level > 0.0)
    check(tx_dataset_add_noise(ds.get(), kNoiseKinds.at(o.data.noise_kind), o.data.noise_level, o.train.seed));
}

json history_json(const tx_history* history, const std::string& out) {
  tx_history_summary s;
  check(tx_history_summary_get(history, &s));
  std::string lines;
  json last = nullptr;
  for (size_t i = 0; i < s.epochs; ++i) {
    tx_epoch_record r;
    check(tx_history_epoch(history, i, &r));
    json line = {{"epoch", r.epoch}, {"loss", r.loss}, {"type_acc", r.type_acc}};
    lines += line.dump() + "\n";
    last = std::move(line);
  }
  if (!out.empty()) write_text(fs::path(out) / "history.jsonl", lines);
  return {{"epochs", s.epochs},
          {"best_epoch", s.best_epoch},
          {"early_stopped", s.early_stopped != 0},
          {"diverged", s.diverged != 0},
          {"last", last}};
}

// Keeps the history written when training fails numerically.
void check_training(tx_status status, const tx_history* history, const std::string& out) {
  if (status == TX_ERR_NUMERIC && history != nullptr) {
    const std::string message = tx_last_error();
    history_json(history, out);
    throw CliFailure{status, message};
  }
  check(status);
}

void emit_metrics(const std::string& out, const json& metrics) {
  const std::string text = metrics.dump(2) + "\n";
  if (!out.empty()) write_text(fs::path(out) / "metrics.json", text);
  std::cout << metrics.dump() << "\n";
}

json base_metrics(const char* task, const Options& o) {
  return {{"task", task}, {"seed", o.train.seed}};
}

json full_config(const Options& o) {
  json c = o.train.to_json();
  c.update(o.encoder.to_json());
  c.update(o.data.to_json());
  return c;
}

json probe_json(const tx_probe_config& p) {
  return {{"probe_lr", p.lr}, {"probe_epochs", p.epochs}, {"probe_weight_decay", p.weight_decay}, {"slope", p.feature_slope}};
}

void run_pretrain(const Options& o) {
  prepare_out(o.out);
  Dataset ds;
  load_data(o, ds, true);
  const tx_encoder_config enc = o.encoder.config();
  const tx_train_config train = o.train.config();
  Model model;
  History history;
  check_training(tx_pretrain(ds.get(), &enc, &train, model.out(), history.out()), history.get(), o.out);
  double type_acc = 0.0;
  check(tx_type_accuracy(model.get(), ds.get(), o.train.rate, o.train.seed, &type_acc));
  uint64_t params = 0;
  check(tx_model_parameter_count(model.get(), &params));
  if (!o.out.empty()) check(tx_model_save(model.get(), (fs::path(o.out) / "checkpoint.bin").c_str()));
  json m = base_metrics("pretrain", o);
  m["type_accuracy"] = type_acc;
  m["parameters"] = params;
  m["history"] = history_json(history.get(), o.out);
  m["config"] = full_config(o);
  emit_metrics(o.out, m);
}

void run_probe(const Options& o) {
  prepare_out(o.out);
  Dataset ds;
  load_data(o, ds, true);
  tx_encoder_config enc = o.encoder.config();
  Model model;
  json m = base_metrics("probe", o);
  if (!o.checkpoint.empty()) {
    tx_dataset_info info;
    check(tx_dataset_info_get(ds.get(), &info));
    if (enc.in_channels == 0) enc.in_channels = info.channels;
    check(tx_model_load(&enc, o.checkpoint.c_str(), model.out()));
  } else {
    const tx_train_config train = o.train.config();
    History history;
    check_training(tx_pretrain(ds.get(), &enc, &train, model.out(), history.out()), history.get(), o.out);
    m["history"] = history_json(history.get(), o.out);
    if (!o.out.empty()) check(tx_model_save(model.get(), (fs::path(o.out) / "checkpoint.bin").c_str()));
  }
  double accuracy = 0.0;
  check(tx_probe(model.get(), ds.get(), &o.probe, o.train.seed, &accuracy));
  m["accuracy"] = accuracy;
  json c = full_config(o);
  c.update(probe_json(o.probe));
  c["checkpoint"] = o.checkpoint;
  m["config"] = c;
  emit_metrics(o.out, m);
}

void run_linkpred(const Options& o) {
  prepare_out(o.out);
  Dataset ds;
  load_data(o, ds, true);
  const tx_encoder_config enc = o.encoder.config();
  const tx_train_config train = o.train.config();
  tx_link_result r;
  History history;
  check_training(tx_run_linkpred(ds.get(), &enc, &train, &o.finetune, o.no_pretrain ? 0 : 1, &r, history.out()),
                 history.get(), o.out);
  json m = base_metrics("linkpred", o);
  m["auc"] = r.test_auc;
  m["ap"] = r.test_ap;
  m["val_auc"] = r.val_auc;
  m["val_ap"] = r.val_ap;
  m["train_edges"] = r.train_edges;
  m["history"] = history_json(history.get(), o.out);
  json c = full_config(o);
  c["finetune_lr"] = o.finetune.lr;
  c["finetune_epochs"] = o.finetune.epochs;
  c["pretrain"] = !o.no_pretrain;
  m["config"] = c;
  emit_metrics(o.out, m);
}

void run_temporal(const Options& o) {
  prepare_out(o.out);
  Dataset ds;
  load_data(o, ds, true);
  const tx_encoder_config enc = o.encoder.config();
  const tx_train_config train = o.train.config();
  tx_temporal_result r;
  History history;
  check_training(tx_run_temporal(ds.get(), &enc, &train, o.no_pretrain ? 0 : 1, &r, history.out()),
                 history.get(), o.out);
  json m = base_metrics("temporal", o);
  m["auc"] = r.auc;
  m["ap"] = r.ap;
  m["added"] = r.added;
  m["removed"] = r.removed;
  m["history"] = history_json(history.get(), o.out);
  json c = full_config(o);
  c["pretrain"] = !o.no_pretrain;
  m["config"] = c;
  emit_metrics(o.out, m);
}

void run_equivariance(const Options& o) {
  prepare_out(o.out);
  Dataset ds;
  load_data(o, ds, true);
  const tx_train_config train = o.train.config();
  tx_equivariance_result r;
  History history;
  check_training(tx_run_equivariance(ds.get(), o.encoder.channels, &train,
                                     o.out.empty() ? nullptr : o.out.c_str(), &r, history.out()),
                 history.get(), o.out);
  json m = base_metrics("equivariance", o);
  m["type_accuracy"] = r.type_accuracy;
  m["residual"] = r.residual;
  m["truth_residual"] = r.truth_residual;
  m["estimated_entries"] = r.estimated_entries;
  m["history"] = history_json(history.get(), o.out);
  json c = o.train.to_json();
  c["channels"] = o.encoder.channels;
  c.update(o.data.to_json());
  m["config"] = c;
  emit_metrics(o.out, m);
}

void run_graphclass(const Options& o) {
  prepare_out(o.out);
  Collection col;
  if (!o.data.dataset.empty())
    check(tx_collection_load(o.data.dataset.c_str(), col.out()));
  else
    check(tx_collection_generate(o.graphs, o.min_nodes, o.max_nodes, o.graph_features, o.train.seed, col.out()));
  const tx_encoder_config enc = o.encoder.config();
  const tx_train_config train = o.train.config();
  double accuracy = 0.0;
  History history;
  check_training(tx_run_graphclass(col.get(), &enc, &train, o.batch_size, &o.probe, o.folds,
                                   o.no_pretrain ? 0 : 1, &accuracy, history.out()),
                 history.get(), o.out);
  json m = base_metrics("graphclass", o);
  m["accuracy"] = accuracy;
  m["history"] = history_json(history.get(), o.out);
  json c = o.train.to_json();
  c.update(o.encoder.to_json());
  c.update(probe_json(o.probe));
  c["batch_size"] = o.batch_size;
  c["folds"] = o.folds;
  c["pretrain"] = !o.no_pretrain;
  if (!o.data.dataset.empty()) {
    c["dataset"] = o.data.dataset;
  } else {
    c["graphs"] = o.graphs;
    c["min_nodes"] = o.min_nodes;
    c["max_nodes"] = o.max_nodes;
    c["graph_features"] = o.graph_features;
  }
  m["config"] = c;
  emit_metrics(o.out, m);
}

void run_gradcheck(const Options& o) {
  prepare_out(o.out);
  tx_gradcheck_result r;
  check(tx_run_gradcheck(o.nodes, o.encoder.channels, o.train.seed, o.step, &r));
  json m = base_metrics("gradcheck", o);
  m["max_relative_error"] = r.worst;
  m["sgc_order1"] = r.sgc_order1;
  m["sgc_order2"] = r.sgc_order2;
  m["gcn"] = r.gcn;
  m["gin"] = r.gin;
  m["config"] = {{"nodes", o.nodes}, {"channels", o.encoder.channels}, {"h", o.step}, {"seed", o.train.seed}};
  emit_metrics(o.out, m);
}

void run_paramcount(const Options& o) {
  prepare_out(o.out);
  if (o.encoder.channels_in == 0) usage_error("paramcount needs --channels-in");
  const uint64_t count = tx_sgc_parameter_count(o.encoder.channels_in, o.encoder.channels);
  std::cout << count << "\n";
  if (!o.out.empty()) {
    json m = base_metrics("paramcount", o);
    m["parameters"] = count;
    m["config"] = {{"channels_in", o.encoder.channels_in}, {"channels", o.encoder.channels}};
    write_text(fs::path(o.out) / "metrics.json", m.dump(2) + "\n");
  }
}

void run_gen_sbm(const Options& o) {
  if (o.out.empty()) usage_error("gen-sbm needs --out");
  prepare_out(o.out);
  Dataset ds;
  check(tx_dataset_generate_sbm(&o.data.sbm, o.train.seed, ds.out()));
  check(tx_dataset_save(ds.get(), o.out.c_str()));
  tx_dataset_info info;
  check(tx_dataset_info_get(ds.get(), &info));
  json m = base_metrics("gen-sbm", o);
  m["nodes"] = info.nodes;
  m["edges"] = info.edges;
  m["channels"] = info.channels;
  m["classes"] = info.classes;
  m["config"] = o.data.to_json();
  m["config"].erase("noise_kind");
  m["config"].erase("noise_level");
  emit_metrics(o.out, m);
}

void print_error(tx_status status, const std::string& message) {
  std::cerr << json{{"error", message}, {"code", static_cast<int>(status)}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topology-transformation pretraining for graph encoders"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tx_version());

  // One option set per subcommand; defaults differ by task.
  std::map<std::string, Options> opts;
  std::map<CLI::App*, void (*)(const Options&)> handlers;
  auto make = [&](const char* name, const char* help, void (*handler)(const Options&)) {
    Options& o = opts[name];
    tx_sbm_config_default(&o.data.sbm);
    tx_probe_config_default(&o.probe);
    tx_finetune_config_default(&o.finetune);
    CLI::App* sub = app.add_subcommand(name, help);
    handlers[sub] = handler;
    return std::pair<CLI::App*, Options*>{sub, &o};
  };

  {
    auto [sub, o] = make("pretrain", "Pretrain an encoder by predicting topology transformations", run_pretrain);
    add_encoder_flags(sub, o->encoder);
    add_train_flags(sub, o->train);
    add_data_flags(sub, o->data, true);
    add_out_flag(sub, o->out);
  }
  {
    auto [sub, o] = make("probe", "Pretrain (or load) an encoder and score a linear probe on node labels", run_probe);
    add_encoder_flags(sub, o->encoder);
    add_train_flags(sub, o->train);
    add_data_flags(sub, o->data, true);
    add_out_flag(sub, o->out);
    sub->add_option("--slope", o->probe.feature_slope, "LeakyReLU slope on frozen representations")
        ->capture_default_str();
    sub->add_option("--probe-lr", o->probe.lr, "Probe learning rate")->capture_default_str();
    sub->add_option("--probe-epochs", o->probe.epochs, "Probe epochs")->capture_default_str();
    sub->add_option("--weight-decay", o->probe.weight_decay, "Probe L2 penalty")->capture_default_str();
    sub->add_option("--checkpoint", o->checkpoint, "Load encoder weights instead of pretraining");
  }
  {
    auto [sub, o] = make("linkpred", "Pretrain, fine-tune with an inner-product decoder, score held-out links",
                         run_linkpred);
    o->encoder.kind = "gcn";
    o->encoder.hidden = 32;
    o->encoder.channels = 16;
    o->train.rate = 0.5;
    o->train.lr = 1e-3;
    add_encoder_flags(sub, o->encoder);
    add_train_flags(sub, o->train);
    add_data_flags(sub, o->data, true);
    add_out_flag(sub, o->out);
    sub->add_option("--finetune-lr", o->finetune.lr, "Fine-tuning learning rate")->capture_default_str();
    sub->add_option("--finetune-epochs", o->finetune.epochs, "Fine-tuning epochs")->capture_default_str();
    sub->add_flag("--no-pretrain", o->no_pretrain, "Skip pretraining (untrained-encoder baseline)");
  }
  {
    auto [sub, o] = make("temporal", "Train on consecutive snapshots and predict the edges of the later one",
                         run_temporal);
    o->encoder.kind = "gcn";
    o->encoder.hidden = 32;
    o->encoder.channels = 256;
    o->train.lr = 1e-3;
    o->data.sbm.drift = 0.1;
    add_encoder_flags(sub, o->encoder);
    add_train_flags(sub, o->train);
    add_data_flags(sub, o->data, true);
    add_out_flag(sub, o->out);
    sub->add_flag("--no-pretrain", o->no_pretrain, "Skip training (untrained-encoder baseline)");
  }
  {
    auto [sub, o] = make("equivariance", "Compare H + dH from the estimated transformation against H~",
                         run_equivariance);
    o->encoder.channels = 32;
    o->data.sbm.drift = 0.1;
    o->train.lr = 1e-2;
    o->train.epochs = 200;
    sub->add_option("--channels", o->encoder.channels, "Output channels F")->capture_default_str();
    add_train_flags(sub, o->train);
    add_data_flags(sub, o->data, true);
    add_out_flag(sub, o->out);
  }
  {
    auto [sub, o] = make("graphclass", "Pretrain a GIN on a graph collection and probe pooled features",
                         run_graphclass);
    o->encoder.kind = "gin";
    o->encoder.hidden = 32;
    o->encoder.channels = 32;
    o->encoder.layers = 3;
    o->train.rate = 0.5;
    o->train.lr = 1e-3;
    add_encoder_flags(sub, o->encoder);
    add_train_flags(sub, o->train);
    add_out_flag(sub, o->out);
    sub->add_option("--dataset", o->data.dataset, "Graph collection directory (default: generated)");
    sub->add_option("--batch-size", o->batch_size, "Graphs per pretraining batch")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--folds", o->folds, "Cross-validation folds")->check(CLI::Range(2u, 1000u))->capture_default_str();
    sub->add_option("--graphs", o->graphs, "Generated collection size")->capture_default_str();
    sub->add_option("--min-nodes", o->min_nodes, "Generated graph minimum size")->capture_default_str();
    sub->add_option("--max-nodes", o->max_nodes, "Generated graph maximum size")->capture_default_str();
    sub->add_option("--graph-features", o->graph_features, "Degree one-hot width")->capture_default_str();
    sub->add_option("--probe-lr", o->probe.lr, "Probe learning rate")->capture_default_str();
    sub->add_option("--probe-epochs", o->probe.epochs, "Probe epochs")->capture_default_str();
    sub->add_flag("--no-pretrain", o->no_pretrain, "Skip pretraining (untrained-encoder baseline)");
  }
  {
    auto [sub, o] = make("gradcheck", "Check analytic gradients against central differences", run_gradcheck);
    o->encoder.channels = 8;
    sub->add_option("--nodes", o->nodes, "Random graph size")->capture_default_str();
    sub->add_option("--channels", o->encoder.channels, "Encoder output channels")->capture_default_str();
    sub->add_option("--step", o->step, "Finite-difference step h")->capture_default_str();
    sub->add_option("--seed", o->train.seed, "Run seed")->capture_default_str();
    add_out_flag(sub, o->out);
  }
  {
    auto [sub, o] = make("paramcount", "Parameter count of the SGC model with the four-way decoder",
                         run_paramcount);
    sub->add_option("--channels-in", o->encoder.channels_in, "Input channels C")->required();
    sub->add_option("--channels,--channels-out", o->encoder.channels, "Output channels F")->capture_default_str();
    add_out_flag(sub, o->out);
  }
  {
    auto [sub, o] = make("gen-sbm", "Write a stochastic block model dataset", run_gen_sbm);
    add_data_flags(sub, o->data, false);
    sub->remove_option(sub->get_option("--dataset"));
    sub->add_option("--seed", o->train.seed, "Generator seed")->capture_default_str();
    add_out_flag(sub, o->out);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(TX_ERR_USAGE, e.what());
    return TX_ERR_USAGE;
  }

  try {
    for (auto& [sub, handler] : handlers) {
      if (sub->parsed()) handler(opts.at(sub->get_name()));
    }
  } catch (const CliFailure& f) {
    print_error(f.status, f.message);
    return f.status;
  } catch (const std::exception& e) {
    print_error(TX_ERR_INTERNAL, e.what());
    return TX_ERR_INTERNAL;
  }
  return 0;
}
