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

#include "gridgp/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gridgp/errors.hpp"

namespace fs = std::filesystem;

namespace gridgp {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Stage tagging: failures carry the pipeline stage so partial artifacts can
// be interpreted.
template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("[") + stage + "] " + e.what());
  }
}

std::vector<int> parse_selection(const nlohmann::json& value, int n,
                                 const std::vector<int>& exclude, std::uint64_t default_seed,
                                 const char* what) {
  if (value.is_array()) return value.get<std::vector<int>>();
  if (!value.is_string()) throw ConfigError(std::string(what) + " must be an array or a selector string");
  const std::string text = value.get<std::string>();
  if (text == "rest") {
    const std::set<int> skip(exclude.begin(), exclude.end());
    std::vector<int> out;
    for (int g = 0; g < n; ++g) {
      if (!skip.count(g)) out.push_back(g);
    }
    return out;
  }
  if (text.rfind("random:", 0) == 0) {
    std::string spec = text.substr(7);
    std::uint64_t seed = default_seed;
    const auto at = spec.find('@');
    if (at != std::string::npos) {
      seed = std::stoull(spec.substr(at + 1));
      spec = spec.substr(0, at);
    }
    const int m = std::stoi(spec);
    const std::set<int> skip(exclude.begin(), exclude.end());
    std::vector<int> pool;
    for (int g = 0; g < n; ++g) {
      if (!skip.count(g)) pool.push_back(g);
    }
    if (m < 1 || m > static_cast<int>(pool.size())) {
      throw ConfigError(std::string(what) + ": cannot choose " + std::to_string(m) + " of " +
                        std::to_string(pool.size()));
    }
    std::mt19937_64 rng(seed);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(m);
    std::sort(pool.begin(), pool.end());
    return pool;
  }
  throw ConfigError(std::string(what) + ": unknown selector '" + text + "'");
}

std::vector<double> default_lags(double reporting_rate) {
  const long stride = std::max<long>(1, std::llround(reporting_rate / 8.0));
  std::vector<double> lags;
  for (int k = 0; k < 8; ++k) lags.push_back(k * stride / reporting_rate);
  return lags;
}

void write_json(const nlohmann::json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << doc.dump(2) << "\n";
}

void write_residual_csv(const FitReport& report, const GridModel& model,
                        const std::vector<int>& columns, const std::string& path) {
  int lag0 = -1;
  for (size_t k = 0; k < report.lags.size(); ++k) {
    if (std::abs(report.lags[k]) < 1e-12) lag0 = static_cast<int>(k);
  }
  if (lag0 < 0) lag0 = 0;
  const Matrix abs_res = report.residuals[lag0].cwiseAbs();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "meter";
  for (int g : columns) out << ",g" << model.generator_ids[g];
  out << "\n";
  for (int i = 0; i < abs_res.rows(); ++i) {
    out << "g" << model.generator_ids[columns[i]];
    for (int j = 0; j < abs_res.cols(); ++j) out << "," << format_double(abs_res(i, j));
    out << "\n";
  }
}

}  // namespace

Scenario scenario_from_json(const nlohmann::json& doc, const std::string& base_dir,
                            const std::string& out_dir_override,
                            std::optional<std::uint64_t> seed_override) {
  Scenario sc;
  try {
    sc.name = doc.value("name", std::string("scenario"));
    sc.seed = seed_override.value_or(doc.value("seed", std::uint64_t{0}));

    if (doc.at("model").is_string()) {
      fs::path p = doc.at("model").get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
      sc.model = load_model(p.string());
    } else {
      sc.model = model_from_json(doc.at("model"));
    }
    const int n = sc.model.n;

    sc.simulation = sim_config_from_json(doc.at("simulation"), n);
    if (!doc.at("simulation").contains("seed")) sc.simulation.seed = mix_seed(sc.seed, "sim");
    else if (seed_override) sc.simulation.seed = mix_seed(sc.seed, "sim");

    sc.meters = parse_selection(doc.at("meters"), n, {}, mix_seed(sc.seed, "meters"), "meters");
    sc.targets = parse_selection(doc.value("targets", nlohmann::json("rest")), n, sc.meters,
                                 mix_seed(sc.seed, "targets"), "targets");

    if (doc.contains("corruption") && !doc.at("corruption").is_null()) {
      nlohmann::json plan_doc = doc.at("corruption");
      if (plan_doc.at("target_meters").is_string()) {
        // "random:k[@seed]" draws the corrupted subset from the meters.
        const std::string text = plan_doc.at("target_meters").get<std::string>();
        if (text.rfind("random:", 0) != 0) {
          throw ConfigError("corruption.target_meters: unknown selector '" + text + "'");
        }
        std::string spec = text.substr(7);
        std::uint64_t sel_seed = mix_seed(sc.seed, "corruption_targets");
        const auto at = spec.find('@');
        if (at != std::string::npos) {
          sel_seed = std::stoull(spec.substr(at + 1));
          spec = spec.substr(0, at);
        }
        const int m = std::stoi(spec);
        std::vector<int> pool = sc.meters;
        if (m < 1 || m > static_cast<int>(pool.size())) {
          throw ConfigError("corruption.target_meters: cannot choose " + std::to_string(m) +
                            " of " + std::to_string(pool.size()) + " meters");
        }
        std::mt19937_64 rng(sel_seed);
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(m);
        std::sort(pool.begin(), pool.end());
        plan_doc["target_meters"] = pool;
      }
      CorruptionPlan plan = corruption_plan_from_json(plan_doc);
      if (!plan_doc.contains("seed")) plan.seed = mix_seed(sc.seed, "corruption");
      else if (seed_override) plan.seed = mix_seed(sc.seed, "corruption");
      sc.corruption = plan;
    }

    const auto& learn = doc.value("learning", nlohmann::json::object());
    if (learn.contains("lags")) {
      if (learn.at("lags").is_array()) {
        sc.fit.lags = learn.at("lags").get<std::vector<double>>();
      } else {
        const int count = learn.at("lags").value("count", 8);
        const long stride = learn.at("lags").value("stride_ticks", 1L);
        sc.fit.lags.clear();
        for (int k = 0; k < count; ++k) {
          sc.fit.lags.push_back(k * stride / sc.simulation.reporting_rate);
        }
      }
    } else {
      sc.fit.lags = default_lags(sc.simulation.reporting_rate);
    }
    sc.fit.max_iterations = learn.value("max_iterations", sc.fit.max_iterations);
    sc.fit.tolerance = learn.value("tolerance", sc.fit.tolerance);
    sc.identify.beta = learn.value("beta", sc.identify.beta);
    sc.identify.restarts = learn.value("restarts", sc.identify.restarts);
    sc.identify.max_iterations = learn.value("identify_max_iterations", sc.identify.max_iterations);
    sc.identify.alternating_rounds = learn.value("alternating_rounds", 0);

    if (doc.contains("bandpass") && !doc.at("bandpass").is_null()) {
      const auto band = doc.at("bandpass").get<std::vector<double>>();
      if (band.size() != 2) throw ConfigError("bandpass must be [f_lo, f_hi]");
      sc.bandpass_hz = {band[0], band[1]};
    }
    if (doc.contains("clustering") && !doc.at("clustering").is_null()) {
      sc.cluster_k = doc.at("clustering").value("k", default_cluster_count(n));
    }
    sc.inference_window = doc.value("inference_window", 250);
    sc.window_start = doc.value("window_start", 0);
    sc.with_std = doc.value("with_std", false);
    sc.export_moments = doc.value("export_moments", false);
    sc.out_dir = !out_dir_override.empty() ? out_dir_override : doc.value("outputs", std::string("out"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario document malformed: ") + e.what());
  }

  const std::set<int> meter_set(sc.meters.begin(), sc.meters.end());
  for (int t : sc.targets) {
    if (meter_set.count(t)) {
      throw ConfigError("scenario: target generator index " + std::to_string(t) +
                        " is also metered; meter and target sets must be disjoint");
    }
  }
  if (sc.targets.empty()) throw ConfigError("scenario: target set is empty");
  return sc;
}

Scenario load_scenario(const std::string& path, const std::string& out_dir_override,
                       std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse scenario file " + path + ": " + e.what());
  }
  return scenario_from_json(doc, fs::path(path).parent_path().string(), out_dir_override,
                            seed_override);
}

ScenarioResult run_scenario(const Scenario& sc) {
  ScenarioResult result;
  result.out_dir = sc.out_dir;
  fs::create_directories(sc.out_dir);
  const auto out = [&](const std::string& f) { return (fs::path(sc.out_dir) / f).string(); };
  const GridModel& model = sc.model;

  // Clean simulation, all generators. This is also the scoring ground truth.
  TimeSeriesRecord truth = run_stage("simulate", [&] { return simulate(model, sc.simulation); });
  save_series(truth, out("truth_series.csv"), model);

  TimeSeriesRecord metered =
      run_stage("meters", [&] { return restrict_to_meters(truth, sc.meters); });
  save_series(metered, out("metered_series.csv"), model);

  TruthLabels labels;
  TimeSeriesRecord corrupted = metered;
  if (sc.corruption) {
    auto injected = run_stage("corrupt", [&] { return inject(metered, &model, *sc.corruption); });
    corrupted = std::move(injected.first);
    labels = std::move(injected.second);
  }
  save_series(corrupted, out("corrupted_series.csv"), model);
  write_json(labels_to_json(labels, model), out("truth_labels.json"));

  // Model reduction: filter the observed data and keep the matching modes.
  TimeSeriesRecord working = corrupted;
  TimeSeriesRecord truth_scored = truth;
  EigenBasis basis = run_stage("basis", [&] { return eigen_decompose(model); });
  if (sc.bandpass_hz) {
    working = run_stage("filter", [&] {
      return bandpass_filter(corrupted, (*sc.bandpass_hz)[0], (*sc.bandpass_hz)[1]);
    });
    truth_scored = run_stage("filter", [&] {
      return bandpass_filter(truth, (*sc.bandpass_hz)[0], (*sc.bandpass_hz)[1]);
    });
    basis = run_stage(
        "basis", [&] { return select_modes(basis, (*sc.bandpass_hz)[0], (*sc.bandpass_hz)[1]); });
  }

  Moments moments =
      run_stage("moments", [&] { return sample_moments(working, sc.fit.lags); });
  if (sc.export_moments) export_moment_csv(moments, model, moments.lags.front(), out("moments_c0.csv"));
  KernelTensor kernel =
      run_stage("kernel", [&] { return build_kernel_tensor(basis, moments.lags); });

  FitConfig l2_config = sc.fit;
  l2_config.objective = FitConfig::Objective::l2;
  FitResult l2 = run_stage("fit_l2", [&] { return fit_l2(moments, kernel, basis, model, l2_config); });
  FitConfig l1_config = sc.fit;
  l1_config.objective = FitConfig::Objective::l1;
  FitResult l1 = run_stage("fit_l1", [&] { return fit_l1(moments, kernel, basis, model, l1_config); });
  if (sc.bandpass_hz) {
    l1.learned.band_hz = sc.bandpass_hz;
    l2.learned.band_hz = sc.bandpass_hz;
  }
  write_json(fit_report_to_json(l2.report), out("fit_l2_report.json"));
  write_json(fit_report_to_json(l1.report), out("fit_l1_report.json"));
  write_residual_csv(l2.report, model, moments.columns, out("residual_l2.csv"));
  write_residual_csv(l1.report, model, moments.columns, out("residual_l1.csv"));
  save_learned(l1.learned, out("learned_l1.json"));
  save_learned(l2.learned, out("learned_l2.json"));
  for (const auto& w : l2.report.warnings) result.warnings.push_back("fit_l2: " + w);
  for (const auto& w : l1.report.warnings) result.warnings.push_back("fit_l1: " + w);

  MeterWeights weights =
      run_stage("identify", [&] { return identify(moments, l1.learned, sc.identify); });
  write_json(weights_to_json(weights, model), out("identification.json"));
  const IdentificationScore id_score = score_identification(weights.flagged(), labels.corrupted);

  PredictOptions options;
  options.window_ticks = std::min(sc.inference_window, working.ticks() - sc.window_start);
  options.window_start = sc.window_start;
  options.with_std = sc.with_std;

  // Non-robust baseline: L2 fit, conditioned on everything.
  Prediction pred_l2 = run_stage("infer", [&] {
    return predict_nonmetered(l2.learned, working, nullptr, sc.targets, options);
  });
  save_prediction_csv(pred_l2, model, working.reporting_rate, out("predictions_l2.csv"));

  // Robust path: L1 fit, flagged meters discarded. This is the "full"
  // inference the clustering heuristics are compared against.
  const auto t_full = std::chrono::steady_clock::now();
  Prediction pred_l1 = run_stage("infer", [&] {
    return predict_nonmetered(l1.learned, working, &weights, sc.targets, options);
  });
  const double full_seconds = seconds_since(t_full);
  save_prediction_csv(pred_l1, model, working.reporting_rate, out("predictions_l1_masked.csv"));

  result.timings["full"] = full_seconds;
  if (sc.cluster_k) {
    ClusterAssignment assignment = run_stage("cluster", [&] {
      return cluster_generators(l1.learned, *sc.cluster_k, mix_seed(sc.seed, "cluster"));
    });
    write_json(assignment_to_json(assignment, model), out("clusters.json"));

    const auto t_dr = std::chrono::steady_clock::now();
    Prediction pred_dr = run_stage("infer_dr", [&] {
      return infer_dimension_reduced(l1.learned, working, &weights, sc.targets, assignment, options);
    });
    result.timings["dimension_reduced"] = seconds_since(t_dr);
    save_prediction_csv(pred_dr, model, working.reporting_rate, out("predictions_dr.csv"));

    const auto t_ar = std::chrono::steady_clock::now();
    Prediction pred_ar = run_stage("infer_ar", [&] {
      return infer_aggregate(l1.learned, working, &weights, sc.targets, assignment, options);
    });
    result.timings["dimension_reduced_aggregate"] = seconds_since(t_ar);
    save_prediction_csv(pred_ar, model, working.reporting_rate, out("predictions_ar.csv"));
  }

  // Scores and trajectory plot data.
  nlohmann::json per_target = nlohmann::json::array();
  for (size_t a = 0; a < sc.targets.size(); ++a) {
    const int gen = sc.targets[a];
    const int col = truth_scored.column_of(gen);
    const Vector actual =
        truth_scored.values.col(col).segment(options.window_start, options.window_ticks);
    const double rmse_l2 = normalized_rmse(pred_l2.mean.col(static_cast<int>(a)), actual);
    const double rmse_l1 = normalized_rmse(pred_l1.mean.col(static_cast<int>(a)), actual);
    per_target.push_back({{"generator", gen},
                          {"generator_id", model.generator_ids[gen]},
                          {"rmse_l2_unmasked", rmse_l2},
                          {"rmse_l1_masked", rmse_l1}});

    std::ofstream traj(out("trajectory_g" + std::to_string(model.generator_ids[gen]) + ".csv"));
    if (!traj) throw IoError("cannot write trajectory file");
    traj << "time,actual,predicted_l2,predicted_l1_masked\n";
    for (int t = 0; t < options.window_ticks; ++t) {
      traj << format_double((options.window_start + t) / working.reporting_rate) << ","
           << format_double(actual[t]) << ","
           << format_double(pred_l2.mean(t, static_cast<int>(a))) << ","
           << format_double(pred_l1.mean(t, static_cast<int>(a))) << "\n";
    }
  }

  result.scores["name"] = sc.name;
  result.scores["targets"] = per_target;
  result.scores["identification"] = {{"precision", id_score.precision},
                                     {"recall", id_score.recall},
                                     {"exact_match", id_score.exact_match},
                                     {"flagged", weights.flagged()},
                                     {"truth", labels.corrupted}};
  result.scores["warnings"] = result.warnings;
  write_json(result.scores, out("scores.json"));

  std::ofstream timing(out("timing.csv"));
  timing << "path,seconds\n";
  timing << "full," << format_double(result.timings["full"].get<double>()) << "\n";
  if (result.timings.contains("dimension_reduced")) {
    timing << "dimension_reduced,"
           << format_double(result.timings["dimension_reduced"].get<double>()) << "\n";
    timing << "dimension_reduced+aggregate,"
           << format_double(result.timings["dimension_reduced_aggregate"].get<double>()) << "\n";
  }
  return result;
}

GridModel make_ring_model(int n, std::uint64_t seed, double b_lo, double b_hi, double m_lo,
                          double m_hi, double gamma) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> b_draw(b_lo, b_hi);
  std::uniform_real_distribution<double> m_draw(m_lo, m_hi);
  nlohmann::json doc;
  doc["n"] = n;
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 1);
  doc["generator_ids"] = ids;
  std::vector<double> inertia(n);
  for (double& m : inertia) m = m_draw(rng);
  doc["inertia"] = inertia;
  doc["gamma"] = gamma;
  nlohmann::json branches = nlohmann::json::array();
  for (int i = 0; i < n; ++i) {
    branches.push_back({{"from", i}, {"to", (i + 1) % n}, {"susceptance", b_draw(rng)}});
  }
  std::vector<int> gen_buses(n);
  std::iota(gen_buses.begin(), gen_buses.end(), 0);
  doc["network"] = {{"buses", n}, {"branches", branches}, {"generator_buses", gen_buses}};
  return model_from_json(doc);
}

GridModel make_grouped_model(int groups, int per_group, std::uint64_t seed, double b_intra,
                             double b_inter, double m_lo, double m_hi, double gamma) {
  const int n = groups * per_group;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.85, 1.15);
  std::uniform_real_distribution<double> m_draw(m_lo, m_hi);
  nlohmann::json doc;
  doc["n"] = n;
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 1);
  doc["generator_ids"] = ids;
  std::vector<double> inertia(n);
  for (double& m : inertia) m = m_draw(rng);
  doc["inertia"] = inertia;
  doc["gamma"] = gamma;
  nlohmann::json branches = nlohmann::json::array();
  for (int g = 0; g < groups; ++g) {
    const int base = g * per_group;
    for (int i = 0; i < per_group; ++i) {
      for (int j = i + 1; j < per_group; ++j) {
        branches.push_back(
            {{"from", base + i}, {"to", base + j}, {"susceptance", b_intra * jitter(rng)}});
      }
    }
    const int next_base = ((g + 1) % groups) * per_group;
    branches.push_back(
        {{"from", base}, {"to", next_base}, {"susceptance", b_inter * jitter(rng)}});
  }
  std::vector<int> gen_buses(n);
  std::iota(gen_buses.begin(), gen_buses.end(), 0);
  doc["network"] = {{"buses", n}, {"branches", branches}, {"generator_buses", gen_buses}};
  return model_from_json(doc);
}

GridModel make_paired_model(int pairs, std::uint64_t seed, double b_pair, double b_ring,
                            double m_lo, double m_hi, double gamma) {
  const int n = 2 * pairs;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jit(0.85, 1.15);
  std::uniform_real_distribution<double> m_draw(m_lo, m_hi);
  nlohmann::json doc;
  doc["n"] = n;
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 1);
  doc["generator_ids"] = ids;
  std::vector<double> inertia(n);
  for (double& m : inertia) m = m_draw(rng);
  doc["inertia"] = inertia;
  doc["gamma"] = gamma;
  nlohmann::json branches = nlohmann::json::array();
  for (int p = 0; p < pairs; ++p) {
    branches.push_back({{"from", 2 * p}, {"to", 2 * p + 1}, {"susceptance", b_pair * jit(rng)}});
  }
  for (int p = 0; p < pairs; ++p) {
    branches.push_back(
        {{"from", 2 * p}, {"to", 2 * ((p + 1) % pairs)}, {"susceptance", b_ring * jit(rng)}});
  }
  std::vector<int> gen_buses(n);
  std::iota(gen_buses.begin(), gen_buses.end(), 0);
  doc["network"] = {{"buses", n}, {"branches", branches}, {"generator_buses", gen_buses}};
  return model_from_json(doc);
}

Matrix mode_shaped_intensity(const GridModel& model, double base, int strong, double ladder,
                             double dim_frac, std::uint64_t seed) {
  const EigenBasis basis = eigen_decompose(model);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.85, 1.2);
  Vector d(model.n);
  double level = 1.0;
  for (int i = 0; i < model.n; ++i) {
    d[i] = base * jitter(rng) * (i < strong ? level : dim_frac);
    if (i < strong) level *= ladder;
  }
  const Vector sqrt_m = model.inertia.array().sqrt();
  Matrix q = sqrt_m.asDiagonal() * basis.V * d.asDiagonal() * basis.V.transpose() *
             sqrt_m.asDiagonal();
  return 0.5 * (q + q.transpose());
}

std::vector<int> pick_random_subset(int n, int m, std::uint64_t seed) {
  if (m < 0 || m > n) throw ConfigError("pick_random_subset: m out of range");
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(m);
  std::sort(pool.begin(), pool.end());
  return pool;
}

namespace {

nlohmann::json noise_diag(int n, std::uint64_t seed, double base) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> draw(0.5, 2.0);
  std::vector<double> q(n);
  for (double& v : q) v = base * draw(rng);
  return q;
}

}  // namespace

std::vector<std::string> write_bundled_suite(const std::string& dir) {
  fs::create_directories(dir);
  std::vector<std::string> scenarios;

  // Six-generator ring, the small unfiltered case.
  const GridModel small = make_ring_model(6, 11, 2.0, 5.0, 0.6, 2.2, 0.8);
  save_model(small, (fs::path(dir) / "model_case30.json").string());
  // Thirty-generator ring for the mid-size filtered cases.
  const GridModel mid = make_ring_model(30, 23, 3.0, 8.0, 0.5, 2.5, 0.8);
  save_model(mid, (fs::path(dir) / "model_case300.json").string());
  // Grouped synthetic for the clustering case: 8 tight groups on a weak ring.
  const GridModel big = make_grouped_model(8, 8, 37, 22.0, 9.0, 0.6, 1.8, 0.8);
  save_model(big, (fs::path(dir) / "model_case1354.json").string());

  auto emit = [&](const std::string& name, const nlohmann::json& doc) {
    const std::string path = (fs::path(dir) / (name + ".json")).string();
    write_json(doc, path);
    scenarios.push_back(path);
  };

  {
    nlohmann::json doc;
    doc["name"] = "case30_clean";
    doc["model"] = "model_case30.json";
    doc["seed"] = 101;
    doc["simulation"] = {{"integration_step", 1e-4}, {"duration", 10.0},
                         {"reporting_rate", 240.0},
                         {"noise_intensity", noise_diag(6, 5101, 4e-4)}};
    doc["meters"] = "random:4";
    doc["targets"] = "rest";
    doc["learning"] = {{"beta", 0.8}};
    doc["inference_window"] = 250;
    emit("case30_clean", doc);
  }
  {
    nlohmann::json doc;
    doc["name"] = "case30_gross";
    doc["model"] = "model_case30.json";
    doc["seed"] = 102;
    doc["simulation"] = {{"integration_step", 1e-4}, {"duration", 10.0},
                         {"reporting_rate", 240.0},
                         {"noise_intensity", noise_diag(6, 5102, 4e-4)}};
    doc["meters"] = "random:5";
    doc["targets"] = "rest";
    doc["corruption"] = {{"kind", "gross_errors"}, {"target_meters", "random:1"},
                         {"count", 21}, {"magnitude", 0.1}};
    doc["learning"] = {{"beta", 0.8}};
    doc["inference_window"] = 250;
    emit("case30_gross", doc);
  }
  {
    nlohmann::json doc;
    doc["name"] = "case30_fdi";
    doc["model"] = "model_case30.json";
    doc["seed"] = 103;
    doc["simulation"] = {{"integration_step", 1e-4}, {"duration", 40.0},
                         {"reporting_rate", 240.0},
                         {"noise_intensity", noise_diag(6, 5103, 4e-4)}};
    doc["meters"] = "random:5";
    doc["targets"] = "rest";
    doc["corruption"] = {{"kind", "false_data_injection"}, {"target_meters", "random:1"},
                         {"scale", 1.0}};
    doc["learning"] = {{"beta", 0.8}};
    doc["inference_window"] = 250;
    emit("case30_fdi", doc);
  }
  {
    nlohmann::json doc;
    doc["name"] = "case300_fdi";
    doc["model"] = "model_case300.json";
    doc["seed"] = 104;
    doc["simulation"] = {{"integration_step", 1e-3}, {"duration", 200.0},
                         {"reporting_rate", 30.0},
                         {"noise_intensity", noise_diag(30, 5104, 4e-4)}};
    doc["meters"] = "random:22";
    doc["targets"] = "random:4";
    doc["corruption"] = {{"kind", "false_data_injection"}, {"target_meters", "random:5"},
                         {"scale", 1.0}};
    doc["learning"] = {{"beta", 6.0}};
    doc["bandpass"] = {0.3, 1.0};
    doc["inference_window"] = 200;
    emit("case300_fdi", doc);
  }
  {
    nlohmann::json doc;
    doc["name"] = "case300_drift";
    doc["model"] = "model_case300.json";
    doc["seed"] = 105;
    doc["simulation"] = {{"integration_step", 1e-3}, {"duration", 200.0},
                         {"reporting_rate", 30.0},
                         {"noise_intensity", noise_diag(30, 5105, 4e-4)}};
    doc["meters"] = "random:22";
    doc["targets"] = "random:4";
    doc["corruption"] = {{"kind", "clock_drift"}, {"target_meters", "random:5"},
                         {"drift_rate", 0.1}, {"resync_period", 1.0}};
    doc["learning"] = {{"beta", 17.0},
                       {"lags", {0.0, 0.132, 0.264, 0.396, 0.528, 0.660, 0.792}}};
    doc["bandpass"] = {0.3, 1.0};
    doc["inference_window"] = 200;
    emit("case300_drift", doc);
  }
  {
    nlohmann::json doc;
    doc["name"] = "case1354_dr";
    doc["model"] = "model_case1354.json";
    doc["seed"] = 106;
    doc["simulation"] = {{"integration_step", 5e-4}, {"duration", 80.0},
                         {"reporting_rate", 50.0},
                         {"noise_intensity", noise_diag(64, 5106, 4e-4)}};
    doc["meters"] = "random:24";
    doc["targets"] = "rest";
    doc["corruption"] = {{"kind", "false_data_injection"}, {"target_meters", "random:4"},
                         {"scale", 1.0}};
    doc["learning"] = {{"beta", 6.0}};
    doc["bandpass"] = {0.05, 0.9};
    doc["clustering"] = {{"k", 8}};
    doc["inference_window"] = 150;
    emit("case1354_dr", doc);
  }
  return scenarios;
}

std::vector<std::pair<std::string, ScenarioResult>> run_bundled_suite(const std::string& dir) {
  const auto scenarios = write_bundled_suite(dir);
  std::vector<std::pair<std::string, ScenarioResult>> results;
  for (const auto& path : scenarios) {
    Scenario sc = load_scenario(path);
    sc.out_dir = (fs::path(dir) / sc.name).string();
    results.push_back({sc.name, run_scenario(sc)});
  }
  return results;
}

}  // namespace gridgp
