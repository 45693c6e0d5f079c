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

#include "gridgp.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "gridgp/clustering.hpp"
#include "gridgp/corruption.hpp"
#include "gridgp/errors.hpp"
#include "gridgp/scenario.hpp"
#include "gridgp/scoring.hpp"

namespace {

thread_local std::string g_last_error;

template <typename Fn>
gridgp_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return GRIDGP_OK;
  } catch (const gridgp::Error& e) {
    g_last_error = e.what();
    return static_cast<gridgp_status>(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GRIDGP_ERR_NUMERIC;
  } catch (...) {
    g_last_error = "unknown failure";
    return GRIDGP_ERR_NUMERIC;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw gridgp::ConfigError(what);
}

nlohmann::json parse_json(const char* text, const char* what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw gridgp::ConfigError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

struct gridgp_model {
  gridgp::GridModel value;
};
struct gridgp_series {
  gridgp::TimeSeriesRecord value;
};
struct gridgp_labels {
  gridgp::TruthLabels value;
};
struct gridgp_learned {
  gridgp::LearnedCovariance value;
  gridgp::FitReport report;
};
struct gridgp_weights {
  gridgp::MeterWeights value;
};
struct gridgp_clusters {
  gridgp::ClusterAssignment value;
};

extern "C" {

const char* gridgp_version(void) { return "0.1.0"; }

const char* gridgp_last_error(void) { return g_last_error.c_str(); }

void gridgp_set_threads(int n) { gridgp::set_threads(n); }

/* ---- model ---- */

gridgp_status gridgp_model_load(const char* path, gridgp_model** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new gridgp_model{gridgp::load_model(path)};
  });
}

gridgp_status gridgp_model_from_json(const char* json_text, gridgp_model** out) {
  return guarded([&] {
    require(json_text && out, "null argument");
    *out = new gridgp_model{gridgp::model_from_json(parse_json(json_text, "model json"))};
  });
}

gridgp_status gridgp_model_create(int n, const double* inertia, double gamma,
                                  const double* laplacian_row_major, gridgp_model** out) {
  return guarded([&] {
    require(inertia && laplacian_row_major && out, "null argument");
    gridgp::GridModel model;
    model.n = n;
    model.inertia = Eigen::Map<const gridgp::Vector>(inertia, n);
    model.damping_ratio = gamma;
    model.laplacian =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            laplacian_row_major, n, n);
    model.generator_ids.resize(n);
    for (int i = 0; i < n; ++i) model.generator_ids[i] = i;
    model.validate();
    *out = new gridgp_model{std::move(model)};
  });
}

gridgp_status gridgp_model_save(const gridgp_model* model, const char* path) {
  return guarded([&] {
    require(model && path, "null argument");
    gridgp::save_model(model->value, path);
  });
}

void gridgp_model_free(gridgp_model* model) { delete model; }

int gridgp_model_size(const gridgp_model* model) { return model ? model->value.n : 0; }

gridgp_status gridgp_model_generator_ids(const gridgp_model* model, int* out_ids) {
  return guarded([&] {
    require(model && out_ids, "null argument");
    for (int i = 0; i < model->value.n; ++i) out_ids[i] = model->value.generator_ids[i];
  });
}

/* ---- simulation and series ---- */

gridgp_status gridgp_simulate(const gridgp_model* model, const char* sim_json,
                              gridgp_series** out) {
  return guarded([&] {
    require(model && sim_json && out, "null argument");
    const auto config =
        gridgp::sim_config_from_json(parse_json(sim_json, "simulation json"), model->value.n);
    *out = new gridgp_series{gridgp::simulate(model->value, config)};
  });
}

void gridgp_series_free(gridgp_series* series) { delete series; }

int gridgp_series_ticks(const gridgp_series* series) { return series ? series->value.ticks() : 0; }

int gridgp_series_width(const gridgp_series* series) { return series ? series->value.width() : 0; }

double gridgp_series_rate(const gridgp_series* series) {
  return series ? series->value.reporting_rate : 0.0;
}

gridgp_status gridgp_series_columns(const gridgp_series* series, int* out_indices) {
  return guarded([&] {
    require(series && out_indices, "null argument");
    for (int c = 0; c < series->value.width(); ++c) out_indices[c] = series->value.columns[c];
  });
}

gridgp_status gridgp_series_copy_column(const gridgp_series* series, int generator_index,
                                        double* out_values) {
  return guarded([&] {
    require(series && out_values, "null argument");
    const int col = series->value.column_of(generator_index);
    require(col >= 0, "generator index is not a column of the series");
    for (int t = 0; t < series->value.ticks(); ++t) out_values[t] = series->value.values(t, col);
  });
}

gridgp_status gridgp_series_restrict(const gridgp_series* series, const int* meters, int n_meters,
                                     gridgp_series** out) {
  return guarded([&] {
    require(series && meters && out, "null argument");
    std::vector<int> set(meters, meters + n_meters);
    *out = new gridgp_series{gridgp::restrict_to_meters(series->value, set)};
  });
}

gridgp_status gridgp_series_bandpass(const gridgp_series* series, double f_lo_hz, double f_hi_hz,
                                     gridgp_series** out) {
  return guarded([&] {
    require(series && out, "null argument");
    *out = new gridgp_series{gridgp::bandpass_filter(series->value, f_lo_hz, f_hi_hz)};
  });
}

gridgp_status gridgp_series_save(const gridgp_series* series, const gridgp_model* model,
                                 const char* path) {
  return guarded([&] {
    require(series && model && path, "null argument");
    gridgp::save_series(series->value, path, model->value);
  });
}

gridgp_status gridgp_series_load(const char* path, gridgp_series** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new gridgp_series{gridgp::load_series(path)};
  });
}

/* ---- corruption ---- */

gridgp_status gridgp_corrupt(const gridgp_series* series, const gridgp_model* model,
                             const char* plan_json, gridgp_series** out_series,
                             gridgp_labels** out_labels) {
  return guarded([&] {
    require(series && plan_json && out_series, "null argument");
    const auto plan = gridgp::corruption_plan_from_json(parse_json(plan_json, "corruption plan"));
    auto [corrupted, labels] =
        gridgp::inject(series->value, model ? &model->value : nullptr, plan);
    *out_series = new gridgp_series{std::move(corrupted)};
    if (out_labels) *out_labels = new gridgp_labels{std::move(labels)};
  });
}

void gridgp_labels_free(gridgp_labels* labels) { delete labels; }

int gridgp_labels_count(const gridgp_labels* labels) {
  return labels ? static_cast<int>(labels->value.corrupted.size()) : 0;
}

gridgp_status gridgp_labels_members(const gridgp_labels* labels, int* out_indices) {
  return guarded([&] {
    require(labels && out_indices, "null argument");
    for (size_t i = 0; i < labels->value.corrupted.size(); ++i) {
      out_indices[i] = labels->value.corrupted[i];
    }
  });
}

gridgp_status gridgp_labels_save(const gridgp_labels* labels, const gridgp_model* model,
                                 const char* path) {
  return guarded([&] {
    require(labels && model && path, "null argument");
    std::ofstream out(path);
    if (!out) throw gridgp::IoError(std::string("cannot write ") + path);
    out << gridgp::labels_to_json(labels->value, model->value).dump(2) << "\n";
  });
}

/* ---- learning ---- */

gridgp_status gridgp_learn(const gridgp_model* model, const gridgp_series* series,
                           const char* options_json, gridgp_learned** out) {
  return guarded([&] {
    require(model && series && out, "null argument");
    nlohmann::json options = nlohmann::json::object();
    if (options_json) options = parse_json(options_json, "learning options");

    gridgp::FitConfig config;
    const std::string objective = options.value("objective", std::string("l1"));
    if (objective == "l1") config.objective = gridgp::FitConfig::Objective::l1;
    else if (objective == "l2") config.objective = gridgp::FitConfig::Objective::l2;
    else throw gridgp::ConfigError("objective must be \"l1\" or \"l2\"");
    if (options.contains("lags")) config.lags = options.at("lags").get<std::vector<double>>();
    config.max_iterations = options.value("max_iterations", config.max_iterations);
    config.tolerance = options.value("tolerance", config.tolerance);

    gridgp::TimeSeriesRecord working = series->value;
    gridgp::EigenBasis basis = gridgp::eigen_decompose(model->value);
    std::optional<std::array<double, 2>> band;
    if (options.contains("band_hz") && !options.at("band_hz").is_null()) {
      const auto b = options.at("band_hz").get<std::vector<double>>();
      require(b.size() == 2, "band_hz must be [lo, hi]");
      band = {b[0], b[1]};
      working = gridgp::bandpass_filter(working, b[0], b[1]);
      basis = gridgp::select_modes(basis, b[0], b[1]);
    }
    const auto moments = gridgp::sample_moments(working, config.lags);
    const auto kernel = gridgp::build_kernel_tensor(basis, moments.lags);
    gridgp::FitResult result = config.objective == gridgp::FitConfig::Objective::l1
                                   ? gridgp::fit_l1(moments, kernel, basis, model->value, config)
                                   : gridgp::fit_l2(moments, kernel, basis, model->value, config);
    result.learned.band_hz = band;
    *out = new gridgp_learned{std::move(result.learned), std::move(result.report)};
  });
}

void gridgp_learned_free(gridgp_learned* learned) { delete learned; }

int gridgp_learned_modes(const gridgp_learned* learned) {
  return learned ? learned->value.modes() : 0;
}

gridgp_status gridgp_learned_copy_A(const gridgp_learned* learned, double* out_row_major) {
  return guarded([&] {
    require(learned && out_row_major, "null argument");
    const int r = learned->value.modes();
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < r; ++j) out_row_major[i * r + j] = learned->value.A(i, j);
    }
  });
}

gridgp_status gridgp_learned_sigma(const gridgp_learned* learned, double tau, const int* selector,
                                   int n_sel, double* out) {
  return guarded([&] {
    require(learned && selector && out, "null argument");
    const std::vector<int> sel(selector, selector + n_sel);
    const gridgp::Matrix sigma = gridgp::sigma_of_A(learned->value, tau, sel);
    for (int i = 0; i < n_sel; ++i) {
      for (int j = 0; j < n_sel; ++j) out[i * n_sel + j] = sigma(i, j);
    }
  });
}

gridgp_status gridgp_learned_save(const gridgp_learned* learned, const char* path) {
  return guarded([&] {
    require(learned && path, "null argument");
    gridgp::save_learned(learned->value, path);
  });
}

gridgp_status gridgp_learned_load(const char* path, const gridgp_model* model,
                                  gridgp_learned** out) {
  return guarded([&] {
    require(path && model && out, "null argument");
    *out = new gridgp_learned{gridgp::load_learned(path, model->value), {}};
  });
}

gridgp_status gridgp_learned_report_json(const gridgp_learned* learned, char* buffer,
                                         int buffer_len, int* needed_len) {
  return guarded([&] {
    require(learned, "null argument");
    const std::string text = gridgp::fit_report_to_json(learned->report).dump(2);
    if (needed_len) *needed_len = static_cast<int>(text.size()) + 1;
    if (buffer && buffer_len > 0) {
      const int n = std::min<int>(buffer_len - 1, static_cast<int>(text.size()));
      std::memcpy(buffer, text.data(), n);
      buffer[n] = '\0';
    }
  });
}

/* ---- identification ---- */

gridgp_status gridgp_identify(const gridgp_learned* learned, const gridgp_series* series,
                              double beta, const char* options_json, gridgp_weights** out) {
  return guarded([&] {
    require(learned && series && out, "null argument");
    gridgp::IdentifyConfig config;
    config.beta = beta;
    if (options_json) {
      const auto options = parse_json(options_json, "identify options");
      config.restarts = options.value("restarts", config.restarts);
      config.max_iterations = options.value("max_iterations", config.max_iterations);
      config.alternating_rounds = options.value("alternating_rounds", config.alternating_rounds);
    }
    gridgp::TimeSeriesRecord working = series->value;
    if (learned->value.band_hz) {
      working = gridgp::bandpass_filter(working, (*learned->value.band_hz)[0],
                                        (*learned->value.band_hz)[1]);
    }
    const auto moments = gridgp::sample_moments(working, learned->value.kernel.lags);
    *out = new gridgp_weights{gridgp::identify(moments, learned->value, config)};
  });
}

void gridgp_weights_free(gridgp_weights* weights) { delete weights; }

int gridgp_weights_count(const gridgp_weights* weights) {
  return weights ? static_cast<int>(weights->value.w.size()) : 0;
}

gridgp_status gridgp_weights_values(const gridgp_weights* weights, double* out_w) {
  return guarded([&] {
    require(weights && out_w, "null argument");
    for (int i = 0; i < weights->value.w.size(); ++i) out_w[i] = weights->value.w[i];
  });
}

gridgp_status gridgp_weights_flags(const gridgp_weights* weights, int* out_flags) {
  return guarded([&] {
    require(weights && out_flags, "null argument");
    for (size_t i = 0; i < weights->value.binarized.size(); ++i) {
      out_flags[i] = weights->value.binarized[i] ? 1 : 0;
    }
  });
}

gridgp_status gridgp_weights_save(const gridgp_weights* weights, const gridgp_model* model,
                                  const char* path) {
  return guarded([&] {
    require(weights && model && path, "null argument");
    std::ofstream out(path);
    if (!out) throw gridgp::IoError(std::string("cannot write ") + path);
    out << gridgp::weights_to_json(weights->value, model->value).dump(2) << "\n";
  });
}

gridgp_status gridgp_weights_load(const char* path, gridgp_weights** out) {
  return guarded([&] {
    require(path && out, "null argument");
    std::ifstream in(path);
    if (!in) throw gridgp::IoError(std::string("cannot open ") + path);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw gridgp::IoError(std::string("cannot parse ") + path + ": " + e.what());
    }
    gridgp::MeterWeights weights;
    try {
      weights.beta = doc.at("beta").get<double>();
      weights.threshold = doc.value("threshold", 0.5);
      weights.objective = doc.value("objective", 0.0);
      weights.meters = doc.at("meters").get<std::vector<int>>();
      const auto w = doc.at("w").get<std::vector<double>>();
      weights.w = Eigen::Map<const gridgp::Vector>(w.data(), w.size());
      weights.binarized = doc.at("binarized").get<std::vector<bool>>();
    } catch (const nlohmann::json::exception& e) {
      throw gridgp::ConfigError(std::string("identification document malformed: ") + e.what());
    }
    *out = new gridgp_weights{std::move(weights)};
  });
}

/* ---- inference ---- */

namespace {

gridgp_series* prediction_to_series(const gridgp::Prediction& prediction, double rate,
                                    bool stddev) {
  gridgp::TimeSeriesRecord record;
  record.values = stddev ? prediction.stddev : prediction.mean;
  record.reporting_rate = rate;
  record.start_time = prediction.window_start / rate;
  record.columns = prediction.target_columns;
  record.meter_set.clear();
  record.metadata["column_prefix"] = "predicted_";
  if (stddev) record.metadata["column_suffix"] = "_std";
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& l : prediction.labels) labels.push_back(l);
  record.metadata["labels"] = labels;
  return new gridgp_series{std::move(record)};
}

}  // namespace

gridgp_status gridgp_predict(const gridgp_learned* learned, const gridgp_series* series,
                             const gridgp_weights* weights, const int* targets, int n_targets,
                             int window_ticks, int window_start, int with_std, gridgp_series** out,
                             gridgp_series** out_std) {
  return guarded([&] {
    require(learned && series && targets && out, "null argument");
    gridgp::TimeSeriesRecord working = series->value;
    if (learned->value.band_hz) {
      working = gridgp::bandpass_filter(working, (*learned->value.band_hz)[0],
                                        (*learned->value.band_hz)[1]);
    }
    gridgp::PredictOptions options;
    options.window_ticks = window_ticks > 0 ? window_ticks : std::min(250, working.ticks());
    options.window_start = window_start;
    options.with_std = with_std != 0;
    const std::vector<int> target_set(targets, targets + n_targets);
    const gridgp::Prediction prediction =
        gridgp::predict_nonmetered(learned->value, working, weights ? &weights->value : nullptr,
                                   target_set, options);
    *out = prediction_to_series(prediction, working.reporting_rate, false);
    if (with_std && out_std) {
      *out_std = prediction_to_series(prediction, working.reporting_rate, true);
    }
  });
}

/* ---- clustering ---- */

gridgp_status gridgp_cluster(const gridgp_learned* learned, int k, uint64_t seed,
                             gridgp_clusters** out) {
  return guarded([&] {
    require(learned && out, "null argument");
    *out = new gridgp_clusters{gridgp::cluster_generators(learned->value, k, seed)};
  });
}

void gridgp_clusters_free(gridgp_clusters* clusters) { delete clusters; }

int gridgp_clusters_k(const gridgp_clusters* clusters) {
  return clusters ? clusters->value.k : 0;
}

gridgp_status gridgp_clusters_membership(const gridgp_clusters* clusters, int* out) {
  return guarded([&] {
    require(clusters && out, "null argument");
    for (size_t g = 0; g < clusters->value.membership.size(); ++g) {
      out[g] = clusters->value.membership[g];
    }
  });
}

gridgp_status gridgp_clusters_medoids(const gridgp_clusters* clusters, int* out) {
  return guarded([&] {
    require(clusters && out, "null argument");
    for (int c = 0; c < clusters->value.k; ++c) out[c] = clusters->value.medoids[c];
  });
}

gridgp_status gridgp_clusters_save(const gridgp_clusters* clusters, const gridgp_model* model,
                                   const char* path) {
  return guarded([&] {
    require(clusters && model && path, "null argument");
    std::ofstream out(path);
    if (!out) throw gridgp::IoError(std::string("cannot write ") + path);
    out << gridgp::assignment_to_json(clusters->value, model->value).dump(2) << "\n";
  });
}

gridgp_status gridgp_clusters_load(const char* path, const gridgp_model* model,
                                   gridgp_clusters** out) {
  return guarded([&] {
    require(path && model && out, "null argument");
    std::ifstream in(path);
    if (!in) throw gridgp::IoError(std::string("cannot open ") + path);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw gridgp::IoError(std::string("cannot parse ") + path + ": " + e.what());
    }
    gridgp::ClusterAssignment assignment;
    try {
      assignment.k = doc.at("k").get<int>();
      assignment.cost = doc.value("cost", 0.0);
      assignment.medoids = doc.at("medoids").get<std::vector<int>>();
      assignment.membership.assign(model->value.n, -1);
      for (int g = 0; g < model->value.n; ++g) {
        const std::string key = "g" + std::to_string(model->value.generator_ids[g]);
        assignment.membership[g] = doc.at("assignment").at(key).get<int>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw gridgp::ConfigError(std::string("cluster document malformed: ") + e.what());
    }
    *out = new gridgp_clusters{std::move(assignment)};
  });
}

gridgp_status gridgp_predict_reduced(const gridgp_learned* learned, const gridgp_series* series,
                                     const gridgp_weights* weights, const gridgp_clusters* clusters,
                                     const int* targets, int n_targets, int window_ticks,
                                     int window_start, gridgp_series** out) {
  return guarded([&] {
    require(learned && series && clusters && targets && out, "null argument");
    gridgp::TimeSeriesRecord working = series->value;
    if (learned->value.band_hz) {
      working = gridgp::bandpass_filter(working, (*learned->value.band_hz)[0],
                                        (*learned->value.band_hz)[1]);
    }
    gridgp::PredictOptions options;
    options.window_ticks = window_ticks > 0 ? window_ticks : std::min(250, working.ticks());
    options.window_start = window_start;
    const std::vector<int> target_set(targets, targets + n_targets);
    const gridgp::Prediction prediction = gridgp::infer_dimension_reduced(
        learned->value, working, weights ? &weights->value : nullptr, target_set, clusters->value,
        options);
    *out = prediction_to_series(prediction, working.reporting_rate, false);
  });
}

gridgp_status gridgp_predict_aggregate(const gridgp_learned* learned, const gridgp_series* series,
                                       const gridgp_weights* weights,
                                       const gridgp_clusters* clusters, const int* targets,
                                       int n_targets, int window_ticks, int window_start,
                                       gridgp_series** out) {
  return guarded([&] {
    require(learned && series && clusters && targets && out, "null argument");
    gridgp::TimeSeriesRecord working = series->value;
    if (learned->value.band_hz) {
      working = gridgp::bandpass_filter(working, (*learned->value.band_hz)[0],
                                        (*learned->value.band_hz)[1]);
    }
    gridgp::PredictOptions options;
    options.window_ticks = window_ticks > 0 ? window_ticks : std::min(250, working.ticks());
    options.window_start = window_start;
    const std::vector<int> target_set(targets, targets + n_targets);
    const gridgp::Prediction prediction =
        gridgp::infer_aggregate(learned->value, working, weights ? &weights->value : nullptr,
                                target_set, clusters->value, options);
    *out = prediction_to_series(prediction, working.reporting_rate, false);
  });
}

/* ---- scoring ---- */

gridgp_status gridgp_normalized_rmse(const double* estimate, const double* actual, int length,
                                     double* out) {
  return guarded([&] {
    require(estimate && actual && out, "null argument");
    const gridgp::Vector est = Eigen::Map<const gridgp::Vector>(estimate, length);
    const gridgp::Vector act = Eigen::Map<const gridgp::Vector>(actual, length);
    *out = gridgp::normalized_rmse(est, act);
  });
}

gridgp_status gridgp_score_identification(const int* flagged, int n_flagged, const int* truth,
                                          int n_truth, double* precision, double* recall,
                                          int* exact_match) {
  return guarded([&] {
    require((flagged || n_flagged == 0) && (truth || n_truth == 0), "null argument");
    const std::vector<int> f(flagged, flagged + n_flagged);
    const std::vector<int> t(truth, truth + n_truth);
    const auto score = gridgp::score_identification(f, t);
    if (precision) *precision = score.precision;
    if (recall) *recall = score.recall;
    if (exact_match) *exact_match = score.exact_match ? 1 : 0;
  });
}

/* ---- benchmark orchestration ---- */

gridgp_status gridgp_run_scenario(const char* scenario_path, const char* out_dir,
                                  uint64_t seed_override, int has_seed_override) {
  return guarded([&] {
    require(scenario_path, "null argument");
    std::optional<std::uint64_t> seed;
    if (has_seed_override) seed = seed_override;
    gridgp::Scenario scenario =
        gridgp::load_scenario(scenario_path, out_dir ? out_dir : "", seed);
    gridgp::run_scenario(scenario);
  });
}

gridgp_status gridgp_bench_suite(const char* out_dir) {
  return guarded([&] {
    require(out_dir, "null argument");
    gridgp::run_bundled_suite(out_dir);
  });
}

}  // extern "C"
