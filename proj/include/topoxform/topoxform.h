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

#ifndef TOPOXFORM_TOPOXFORM_H_
#define TOPOXFORM_TOPOXFORM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(TOPOXFORM_BUILDING_LIBRARY)
#define TX_API __declspec(dllexport)
#else
#define TX_API __declspec(dllimport)
#endif
#else
#define TX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum tx_status {
  TX_OK = 0,
  TX_ERR_USAGE = 2,    /* invalid argument or configuration */
  TX_ERR_DATA = 3,     /* missing or malformed input data */
  TX_ERR_NUMERIC = 4,  /* divergence or non-finite values */
  TX_ERR_INTERNAL = 5
} tx_status;

/* Message of the last failed call on this thread; empty after success. */
TX_API const char* tx_last_error(void);
TX_API const char* tx_version(void);

typedef struct tx_dataset tx_dataset;
typedef struct tx_collection tx_collection;
typedef struct tx_model tx_model;
typedef struct tx_history tx_history;

typedef enum tx_encoder_kind { TX_ENCODER_SGC = 0, TX_ENCODER_GCN = 1, TX_ENCODER_GIN = 2 } tx_encoder_kind;
typedef enum tx_noise_kind { TX_NOISE_GAUSSIAN = 0, TX_NOISE_LAPLACE = 1 } tx_noise_kind;

typedef struct tx_encoder_config {
  int kind; /* tx_encoder_kind */
  size_t in_channels; /* 0: taken from the data */
  size_t hidden_channels;
  size_t out_channels;
  unsigned order;  /* SGC propagation order */
  unsigned layers; /* GCN / GIN depth */
  double slope;    /* GCN activation slope, 0 = ReLU */
  double eps;      /* GIN epsilon */
} tx_encoder_config;

typedef struct tx_train_config {
  double rate;
  double lr;
  unsigned max_epochs;
  unsigned patience;
  uint64_t seed;
} tx_train_config;

typedef struct tx_probe_config {
  double lr;
  unsigned epochs;
  double weight_decay;
  double feature_slope; /* LeakyReLU slope applied to frozen representations */
} tx_probe_config;

typedef struct tx_finetune_config {
  double lr;
  unsigned epochs;
} tx_finetune_config;

typedef struct tx_sbm_config {
  size_t block_size;
  size_t blocks;
  double p_in;
  double p_out;
  size_t feature_dim;
  double feature_shift;
  double drift; /* > 0: also generate a drifted second snapshot */
} tx_sbm_config;

TX_API void tx_encoder_config_default(tx_encoder_config* config);
TX_API void tx_train_config_default(tx_train_config* config);
TX_API void tx_probe_config_default(tx_probe_config* config);
TX_API void tx_finetune_config_default(tx_finetune_config* config);
TX_API void tx_sbm_config_default(tx_sbm_config* config);

/* Datasets */

typedef struct tx_dataset_info {
  size_t nodes;
  size_t edges;
  size_t channels;
  size_t classes;
  int has_splits;
  int has_next_snapshot;
} tx_dataset_info;

TX_API tx_status tx_dataset_generate_sbm(const tx_sbm_config* config, uint64_t seed, tx_dataset** out);
TX_API tx_status tx_dataset_load(const char* dir, tx_dataset** out);
TX_API tx_status tx_dataset_save(const tx_dataset* dataset, const char* dir);
TX_API tx_status tx_dataset_info_get(const tx_dataset* dataset, tx_dataset_info* out);
TX_API tx_status tx_dataset_add_noise(tx_dataset* dataset, int kind, double level, uint64_t seed);
TX_API void tx_dataset_free(tx_dataset* dataset);

TX_API tx_status tx_collection_generate(size_t num_graphs, size_t min_nodes, size_t max_nodes,
                                        size_t feature_dim, uint64_t seed, tx_collection** out);
TX_API tx_status tx_collection_load(const char* dir, tx_collection** out);
TX_API tx_status tx_collection_save(const tx_collection* collection, const char* dir);
TX_API tx_status tx_collection_size(const tx_collection* collection, size_t* graphs, size_t* classes);
TX_API void tx_collection_free(tx_collection* collection);

/* Models */

TX_API tx_status tx_model_init(const tx_encoder_config* config, uint64_t seed, tx_model** out);
/* The architecture must match the one the checkpoint was written from. */
TX_API tx_status tx_model_load(const tx_encoder_config* config, const char* path, tx_model** out);
TX_API tx_status tx_model_save(const tx_model* model, const char* path);
TX_API tx_status tx_model_parameter_count(const tx_model* model, uint64_t* out);
TX_API void tx_model_free(tx_model* model);

/* Parameter count of an SGC encoder with the four-way linear decoder. */
TX_API uint64_t tx_sgc_parameter_count(uint64_t in_channels, uint64_t out_channels);

/* Training history */

typedef struct tx_epoch_record {
  unsigned epoch;
  double loss;
  double type_acc;
} tx_epoch_record;

typedef struct tx_history_summary {
  size_t epochs;
  int diverged;
  int early_stopped;
  unsigned best_epoch;
} tx_history_summary;

TX_API tx_status tx_history_summary_get(const tx_history* history, tx_history_summary* out);
TX_API tx_status tx_history_epoch(const tx_history* history, size_t index, tx_epoch_record* out);
TX_API void tx_history_free(tx_history* history);

/* Tasks. history_out arguments are optional (may be NULL). A diverged run returns
   TX_ERR_NUMERIC and still fills history_out. */

/* Pretrains a fresh model initialized from train->seed on the dataset graph. */
TX_API tx_status tx_pretrain(const tx_dataset* dataset, const tx_encoder_config* encoder,
                             const tx_train_config* train, tx_model** model_out,
                             tx_history** history_out);

/* Transformation-type accuracy on a freshly sampled plan at the given rate. */
TX_API tx_status tx_type_accuracy(const tx_model* model, const tx_dataset* dataset, double rate,
                                  uint64_t seed, double* out);

/* Linear-probe test accuracy of the model's frozen encoder. */
TX_API tx_status tx_probe(const tx_model* model, const tx_dataset* dataset,
                          const tx_probe_config* probe, uint64_t seed, double* accuracy);

typedef struct tx_link_result {
  double val_auc;
  double val_ap;
  double test_auc;
  double test_ap;
  size_t train_edges;
} tx_link_result;

TX_API tx_status tx_run_linkpred(const tx_dataset* dataset, const tx_encoder_config* encoder,
                                 const tx_train_config* train, const tx_finetune_config* finetune,
                                 int pretrain, tx_link_result* out, tx_history** history_out);

typedef struct tx_temporal_result {
  double auc;
  double ap;
  size_t added;
  size_t removed;
} tx_temporal_result;

/* Requires a dataset with a second snapshot. */
TX_API tx_status tx_run_temporal(const tx_dataset* dataset, const tx_encoder_config* encoder,
                                 const tx_train_config* train, int pretrain,
                                 tx_temporal_result* out, tx_history** history_out);

TX_API tx_status tx_run_graphclass(const tx_collection* collection, const tx_encoder_config* encoder,
                                   const tx_train_config* train, size_t batch_size,
                                   const tx_probe_config* probe, unsigned folds, int pretrain,
                                   double* accuracy, tx_history** history_out);

typedef struct tx_equivariance_result {
  double type_accuracy;
  double residual;       /* with the estimated transformation */
  double truth_residual; /* with the true transformation */
  size_t estimated_entries;
} tx_equivariance_result;

/* dump_dir, when non-NULL, receives H, H~, dH and H + dH as headerless CSV. */
TX_API tx_status tx_run_equivariance(const tx_dataset* dataset, size_t channels,
                                     const tx_train_config* train, const char* dump_dir,
                                     tx_equivariance_result* out, tx_history** history_out);

typedef struct tx_gradcheck_result {
  double sgc_order1;
  double sgc_order2;
  double gcn;
  double gin;
  double worst;
} tx_gradcheck_result;

TX_API tx_status tx_run_gradcheck(size_t nodes, size_t channels, uint64_t seed, double h,
                                  tx_gradcheck_result* out);

#ifdef __cplusplus
}
#endif

#endif  /* TOPOXFORM_TOPOXFORM_H_ */
