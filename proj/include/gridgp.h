/*
 * Copyright 2026 The gridgp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C API of the gridgp shared library.
 *
 * Opaque handles own immutable objects; every function returns a status code
 * and never throws across the ABI. On failure, gridgp_last_error() returns a
 * thread-local message describing what went wrong. Structured parameters
 * (simulation settings, corruption plans, learning options) are passed as
 * JSON text using the same schemas as the on-disk scenario files; see the
 * README for the field reference.
 *
 * Generators are addressed by 0-based index into the model. Status codes
 * match the CLI exit codes: 0 ok, 2 configuration error, 3 numerical
 * failure, 4 file I/O error.
 */

#ifndef GRIDGP_H
#define GRIDGP_H

#include <stdint.h>

#if defined(_WIN32)
#define GRIDGP_API __declspec(dllexport)
#else
#define GRIDGP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gridgp_status {
  GRIDGP_OK = 0,
  GRIDGP_ERR_CONFIG = 2,
  GRIDGP_ERR_NUMERIC = 3,
  GRIDGP_ERR_IO = 4
} gridgp_status;

GRIDGP_API const char* gridgp_version(void);
/* Thread-local message for the most recent failure; empty string if none. */
GRIDGP_API const char* gridgp_last_error(void);
/* Worker threads used by parallel sections (results never depend on it). */
GRIDGP_API void gridgp_set_threads(int n);

typedef struct gridgp_model gridgp_model;
typedef struct gridgp_series gridgp_series;
typedef struct gridgp_labels gridgp_labels;
typedef struct gridgp_learned gridgp_learned;
typedef struct gridgp_weights gridgp_weights;
typedef struct gridgp_clusters gridgp_clusters;

/* ---- grid model ---- */
GRIDGP_API gridgp_status gridgp_model_load(const char* path, gridgp_model** out);
GRIDGP_API gridgp_status gridgp_model_from_json(const char* json_text, gridgp_model** out);
GRIDGP_API gridgp_status gridgp_model_create(int n, const double* inertia, double gamma,
                                             const double* laplacian_row_major,
                                             gridgp_model** out);
GRIDGP_API gridgp_status gridgp_model_save(const gridgp_model* model, const char* path);
GRIDGP_API void gridgp_model_free(gridgp_model* model);
GRIDGP_API int gridgp_model_size(const gridgp_model* model);
GRIDGP_API gridgp_status gridgp_model_generator_ids(const gridgp_model* model, int* out_ids);

/* ---- simulation and series ---- */
GRIDGP_API gridgp_status gridgp_simulate(const gridgp_model* model, const char* sim_json,
                                         gridgp_series** out);
GRIDGP_API void gridgp_series_free(gridgp_series* series);
GRIDGP_API int gridgp_series_ticks(const gridgp_series* series);
GRIDGP_API int gridgp_series_width(const gridgp_series* series);
GRIDGP_API double gridgp_series_rate(const gridgp_series* series);
GRIDGP_API gridgp_status gridgp_series_columns(const gridgp_series* series, int* out_indices);
GRIDGP_API gridgp_status gridgp_series_copy_column(const gridgp_series* series,
                                                   int generator_index, double* out_values);
GRIDGP_API gridgp_status gridgp_series_restrict(const gridgp_series* series, const int* meters,
                                                int n_meters, gridgp_series** out);
GRIDGP_API gridgp_status gridgp_series_bandpass(const gridgp_series* series, double f_lo_hz,
                                                double f_hi_hz, gridgp_series** out);
GRIDGP_API gridgp_status gridgp_series_save(const gridgp_series* series,
                                            const gridgp_model* model, const char* path);
GRIDGP_API gridgp_status gridgp_series_load(const char* path, gridgp_series** out);

/* ---- corruption ---- */
GRIDGP_API gridgp_status gridgp_corrupt(const gridgp_series* series, const gridgp_model* model,
                                        const char* plan_json, gridgp_series** out_series,
                                        gridgp_labels** out_labels);
GRIDGP_API void gridgp_labels_free(gridgp_labels* labels);
GRIDGP_API int gridgp_labels_count(const gridgp_labels* labels);
GRIDGP_API gridgp_status gridgp_labels_members(const gridgp_labels* labels, int* out_indices);
GRIDGP_API gridgp_status gridgp_labels_save(const gridgp_labels* labels,
                                            const gridgp_model* model, const char* path);

/* ---- learning ----
 * options_json: {"objective":"l1"|"l2", "lags":[seconds...],
 *                "band_hz":[lo,hi] (optional; filters data and selects modes),
 *                "max_iterations":..., "tolerance":...}
 */
GRIDGP_API gridgp_status gridgp_learn(const gridgp_model* model, const gridgp_series* series,
                                      const char* options_json, gridgp_learned** out);
GRIDGP_API void gridgp_learned_free(gridgp_learned* learned);
GRIDGP_API int gridgp_learned_modes(const gridgp_learned* learned);
GRIDGP_API gridgp_status gridgp_learned_copy_A(const gridgp_learned* learned, double* out_row_major);
/* Selected block of Sigma_tau(A); out must hold n_sel * n_sel doubles. */
GRIDGP_API gridgp_status gridgp_learned_sigma(const gridgp_learned* learned, double tau,
                                              const int* selector, int n_sel, double* out);
GRIDGP_API gridgp_status gridgp_learned_save(const gridgp_learned* learned, const char* path);
GRIDGP_API gridgp_status gridgp_learned_load(const char* path, const gridgp_model* model,
                                             gridgp_learned** out);
GRIDGP_API gridgp_status gridgp_learned_report_json(const gridgp_learned* learned, char* buffer,
                                                    int buffer_len, int* needed_len);

/* ---- corrupted meter identification ---- */
GRIDGP_API gridgp_status gridgp_identify(const gridgp_learned* learned,
                                         const gridgp_series* series, double beta,
                                         const char* options_json, gridgp_weights** out);
GRIDGP_API void gridgp_weights_free(gridgp_weights* weights);
GRIDGP_API int gridgp_weights_count(const gridgp_weights* weights);
GRIDGP_API gridgp_status gridgp_weights_values(const gridgp_weights* weights, double* out_w);
GRIDGP_API gridgp_status gridgp_weights_flags(const gridgp_weights* weights, int* out_flags);
GRIDGP_API gridgp_status gridgp_weights_save(const gridgp_weights* weights,
                                             const gridgp_model* model, const char* path);
GRIDGP_API gridgp_status gridgp_weights_load(const char* path, gridgp_weights** out);

/* ---- GP inference ----
 * Predictions condition on the series' meters over [window_start,
 * window_start + window_ticks); flagged meters are dropped first when
 * weights is non-null. The result is a series whose columns are the target
 * trajectories (plus posterior stds when with_std != 0).
 */
GRIDGP_API gridgp_status gridgp_predict(const gridgp_learned* learned, const gridgp_series* series,
                                        const gridgp_weights* weights, const int* targets,
                                        int n_targets, int window_ticks, int window_start,
                                        int with_std, gridgp_series** out,
                                        gridgp_series** out_std);

/* ---- clustering ---- */
GRIDGP_API gridgp_status gridgp_cluster(const gridgp_learned* learned, int k, uint64_t seed,
                                        gridgp_clusters** out);
GRIDGP_API void gridgp_clusters_free(gridgp_clusters* clusters);
GRIDGP_API int gridgp_clusters_k(const gridgp_clusters* clusters);
GRIDGP_API gridgp_status gridgp_clusters_membership(const gridgp_clusters* clusters, int* out);
GRIDGP_API gridgp_status gridgp_clusters_medoids(const gridgp_clusters* clusters, int* out);
GRIDGP_API gridgp_status gridgp_clusters_save(const gridgp_clusters* clusters,
                                              const gridgp_model* model, const char* path);
GRIDGP_API gridgp_status gridgp_clusters_load(const char* path, const gridgp_model* model,
                                              gridgp_clusters** out);
/* Dimension-reduced inference: per-target conditioning on same-cluster meters. */
GRIDGP_API gridgp_status gridgp_predict_reduced(const gridgp_learned* learned,
                                                const gridgp_series* series,
                                                const gridgp_weights* weights,
                                                const gridgp_clusters* clusters,
                                                const int* targets, int n_targets,
                                                int window_ticks, int window_start,
                                                gridgp_series** out);
/* Aggregate representation: one inertia-weighted equivalent per cluster. */
GRIDGP_API gridgp_status gridgp_predict_aggregate(const gridgp_learned* learned,
                                                  const gridgp_series* series,
                                                  const gridgp_weights* weights,
                                                  const gridgp_clusters* clusters,
                                                  const int* targets, int n_targets,
                                                  int window_ticks, int window_start,
                                                  gridgp_series** out);

/* ---- scoring ---- */
GRIDGP_API gridgp_status gridgp_normalized_rmse(const double* estimate, const double* actual,
                                                int length, double* out);
GRIDGP_API gridgp_status gridgp_score_identification(const int* flagged, int n_flagged,
                                                     const int* truth, int n_truth,
                                                     double* precision, double* recall,
                                                     int* exact_match);

/* ---- benchmark orchestration ---- */
GRIDGP_API gridgp_status gridgp_run_scenario(const char* scenario_path, const char* out_dir,
                                             uint64_t seed_override, int has_seed_override);
GRIDGP_API gridgp_status gridgp_bench_suite(const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* GRIDGP_H */
