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

// Command-line frontend. Everything numerical goes through the C API of the
// shared library; this file only parses arguments, slices config documents
// and moves files around.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gridgp.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int fail(gridgp_status status) {
  std::fprintf(stderr, "error: %s\n", gridgp_last_error());
  return static_cast<int>(status);
}

int fail_config(const std::string& message) {
  std::fprintf(stderr, "error: %s\n", message.c_str());
  return static_cast<int>(GRIDGP_ERR_CONFIG);
}

json load_config(const std::string& path, int& exit_code) {
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "error: cannot open config file %s\n", path.c_str());
    exit_code = static_cast<int>(GRIDGP_ERR_IO);
    return {};
  }
  try {
    json doc;
    in >> doc;
    exit_code = 0;
    return doc;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "error: cannot parse %s: %s\n", path.c_str(), e.what());
    exit_code = static_cast<int>(GRIDGP_ERR_CONFIG);
    return {};
  }
}

std::string resolve(const json& doc, const char* key, const std::string& config_path) {
  if (!doc.contains(key)) return {};
  fs::path p = doc.at(key).get<std::string>();
  if (p.is_relative()) p = fs::path(config_path).parent_path() / p;
  return p.string();
}

struct ModelHandle {
  gridgp_model* ptr{nullptr};
  ~ModelHandle() { gridgp_model_free(ptr); }
};
struct SeriesHandle {
  gridgp_series* ptr{nullptr};
  ~SeriesHandle() { gridgp_series_free(ptr); }
};
struct LearnedHandle {
  gridgp_learned* ptr{nullptr};
  ~LearnedHandle() { gridgp_learned_free(ptr); }
};
struct WeightsHandle {
  gridgp_weights* ptr{nullptr};
  ~WeightsHandle() { gridgp_weights_free(ptr); }
};
struct ClustersHandle {
  gridgp_clusters* ptr{nullptr};
  ~ClustersHandle() { gridgp_clusters_free(ptr); }
};
struct LabelsHandle {
  gridgp_labels* ptr{nullptr};
  ~LabelsHandle() { gridgp_labels_free(ptr); }
};

int load_model_from(const json& doc, const std::string& config_path, ModelHandle& model) {
  if (!doc.contains("model")) return fail_config("config needs a \"model\" path");
  const std::string path = resolve(doc, "model", config_path);
  if (const auto st = gridgp_model_load(path.c_str(), &model.ptr)) return fail(st);
  return 0;
}

int load_series_from(const json& doc, const std::string& config_path, SeriesHandle& series) {
  if (!doc.contains("series")) return fail_config("config needs a \"series\" path");
  const std::string path = resolve(doc, "series", config_path);
  if (const auto st = gridgp_series_load(path.c_str(), &series.ptr)) return fail(st);
  return 0;
}

std::string learn_options(const json& doc) {
  json options = doc.value("learning", json::object());
  if (doc.contains("bandpass") && !doc.at("bandpass").is_null()) {
    options["band_hz"] = doc.at("bandpass");
  }
  return options.dump();
}

int cmd_simulate(const json& doc, const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed) {
  ModelHandle model;
  if (const int rc = load_model_from(doc, config_path, model)) return rc;
  json sim = doc.value("simulation", json::object());
  if (seed) sim["seed"] = *seed;
  SeriesHandle series;
  if (const auto st = gridgp_simulate(model.ptr, sim.dump().c_str(), &series.ptr)) return fail(st);
  fs::create_directories(out_dir);
  const std::string truth_path = (fs::path(out_dir) / "truth_series.csv").string();
  if (const auto st = gridgp_series_save(series.ptr, model.ptr, truth_path.c_str())) return fail(st);
  std::printf("wrote %s\n", truth_path.c_str());

  if (doc.contains("meters")) {
    const auto meters = doc.at("meters").get<std::vector<int>>();
    SeriesHandle metered;
    if (const auto st = gridgp_series_restrict(series.ptr, meters.data(),
                                               static_cast<int>(meters.size()), &metered.ptr)) {
      return fail(st);
    }
    const std::string metered_path = (fs::path(out_dir) / "metered_series.csv").string();
    if (const auto st = gridgp_series_save(metered.ptr, model.ptr, metered_path.c_str())) {
      return fail(st);
    }
    std::printf("wrote %s\n", metered_path.c_str());
  }
  return 0;
}

int cmd_corrupt(const json& doc, const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed) {
  SeriesHandle series;
  if (const int rc = load_series_from(doc, config_path, series)) return rc;
  ModelHandle model;
  if (doc.contains("model")) {
    if (const int rc = load_model_from(doc, config_path, model)) return rc;
  }
  if (!doc.contains("corruption")) return fail_config("config needs a \"corruption\" plan");
  json plan = doc.at("corruption");
  if (seed) plan["seed"] = *seed;

  SeriesHandle corrupted;
  LabelsHandle labels;
  if (const auto st = gridgp_corrupt(series.ptr, model.ptr, plan.dump().c_str(), &corrupted.ptr,
                                     &labels.ptr)) {
    return fail(st);
  }
  fs::create_directories(out_dir);
  ModelHandle label_model;
  if (!model.ptr) {
    if (const int rc = load_model_from(doc, config_path, label_model)) return rc;
  }
  gridgp_model* m = model.ptr ? model.ptr : label_model.ptr;
  const std::string out_path = (fs::path(out_dir) / "corrupted_series.csv").string();
  const std::string labels_path = (fs::path(out_dir) / "truth_labels.json").string();
  if (const auto st = gridgp_series_save(corrupted.ptr, m, out_path.c_str())) return fail(st);
  if (const auto st = gridgp_labels_save(labels.ptr, m, labels_path.c_str())) return fail(st);
  std::printf("wrote %s\nwrote %s\n", out_path.c_str(), labels_path.c_str());
  return 0;
}

int cmd_learn(const json& doc, const std::string& config_path, const std::string& out_dir) {
  ModelHandle model;
  if (const int rc = load_model_from(doc, config_path, model)) return rc;
  SeriesHandle series;
  if (const int rc = load_series_from(doc, config_path, series)) return rc;

  LearnedHandle learned;
  if (const auto st =
          gridgp_learn(model.ptr, series.ptr, learn_options(doc).c_str(), &learned.ptr)) {
    return fail(st);
  }
  fs::create_directories(out_dir);
  const std::string learned_path = (fs::path(out_dir) / "learned.json").string();
  if (const auto st = gridgp_learned_save(learned.ptr, learned_path.c_str())) return fail(st);
  int needed = 0;
  gridgp_learned_report_json(learned.ptr, nullptr, 0, &needed);
  std::string report(needed, '\0');
  gridgp_learned_report_json(learned.ptr, report.data(), needed, nullptr);
  report.resize(needed > 0 ? needed - 1 : 0);
  const std::string report_path = (fs::path(out_dir) / "fit_report.json").string();
  std::ofstream rep(report_path);
  if (!rep) {
    std::fprintf(stderr, "error: cannot write %s\n", report_path.c_str());
    return static_cast<int>(GRIDGP_ERR_IO);
  }
  rep << report << "\n";
  std::printf("wrote %s\nwrote %s\n", learned_path.c_str(), report_path.c_str());
  return 0;
}

int cmd_identify(const json& doc, const std::string& config_path, const std::string& out_dir) {
  ModelHandle model;
  if (const int rc = load_model_from(doc, config_path, model)) return rc;
  SeriesHandle series;
  if (const int rc = load_series_from(doc, config_path, series)) return rc;
  if (!doc.contains("learned")) return fail_config("config needs a \"learned\" path");
  LearnedHandle learned;
  const std::string learned_path = resolve(doc, "learned", config_path);
  if (const auto st = gridgp_learned_load(learned_path.c_str(), model.ptr, &learned.ptr)) {
    return fail(st);
  }

  const json learning = doc.value("learning", json::object());
  const double beta = learning.value("beta", 0.8);
  WeightsHandle weights;
  if (const auto st =
          gridgp_identify(learned.ptr, series.ptr, beta, learning.dump().c_str(), &weights.ptr)) {
    return fail(st);
  }
  fs::create_directories(out_dir);
  const std::string out_path = (fs::path(out_dir) / "identification.json").string();
  if (const auto st = gridgp_weights_save(weights.ptr, model.ptr, out_path.c_str())) {
    return fail(st);
  }
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

int cmd_infer(const json& doc, const std::string& config_path, const std::string& out_dir) {
  ModelHandle model;
  if (const int rc = load_model_from(doc, config_path, model)) return rc;
  SeriesHandle series;
  if (const int rc = load_series_from(doc, config_path, series)) return rc;
  if (!doc.contains("learned")) return fail_config("config needs a \"learned\" path");
  LearnedHandle learned;
  const std::string learned_path = resolve(doc, "learned", config_path);
  if (const auto st = gridgp_learned_load(learned_path.c_str(), model.ptr, &learned.ptr)) {
    return fail(st);
  }
  WeightsHandle weights;
  if (doc.contains("weights") && !doc.at("weights").is_null()) {
    const std::string weights_path = resolve(doc, "weights", config_path);
    if (const auto st = gridgp_weights_load(weights_path.c_str(), &weights.ptr)) return fail(st);
  }
  if (!doc.contains("targets")) return fail_config("config needs a \"targets\" array");
  const auto targets = doc.at("targets").get<std::vector<int>>();
  const int window = doc.value("inference_window", 0);
  const int start = doc.value("window_start", 0);
  const bool with_std = doc.value("with_std", false);

  const std::string mode = doc.value("mode", std::string("full"));
  fs::create_directories(out_dir);
  SeriesHandle prediction, prediction_std;
  if (mode == "full") {
    if (const auto st = gridgp_predict(learned.ptr, series.ptr, weights.ptr, targets.data(),
                                       static_cast<int>(targets.size()), window, start,
                                       with_std ? 1 : 0, &prediction.ptr,
                                       with_std ? &prediction_std.ptr : nullptr)) {
      return fail(st);
    }
  } else {
    ClustersHandle clusters;
    if (!doc.contains("clusters")) {
      return fail_config("dimension-reduced/aggregate inference needs a \"clusters\" path");
    }
    const std::string clusters_path = resolve(doc, "clusters", config_path);
    if (const auto st = gridgp_clusters_load(clusters_path.c_str(), model.ptr, &clusters.ptr)) {
      return fail(st);
    }
    if (mode == "dr") {
      if (const auto st = gridgp_predict_reduced(learned.ptr, series.ptr, weights.ptr,
                                                 clusters.ptr, targets.data(),
                                                 static_cast<int>(targets.size()), window, start,
                                                 &prediction.ptr)) {
        return fail(st);
      }
    } else if (mode == "ar") {
      if (const auto st = gridgp_predict_aggregate(learned.ptr, series.ptr, weights.ptr,
                                                   clusters.ptr, targets.data(),
                                                   static_cast<int>(targets.size()), window, start,
                                                   &prediction.ptr)) {
        return fail(st);
      }
    } else {
      return fail_config("mode must be one of full, dr, ar");
    }
  }
  const std::string out_path = (fs::path(out_dir) / "predictions.csv").string();
  if (const auto st = gridgp_series_save(prediction.ptr, model.ptr, out_path.c_str())) {
    return fail(st);
  }
  std::printf("wrote %s\n", out_path.c_str());
  if (prediction_std.ptr) {
    const std::string std_path = (fs::path(out_dir) / "predictions_std.csv").string();
    if (const auto st = gridgp_series_save(prediction_std.ptr, model.ptr, std_path.c_str())) {
      return fail(st);
    }
    std::printf("wrote %s\n", std_path.c_str());
  }
  return 0;
}

int cmd_cluster(const json& doc, const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed) {
  ModelHandle model;
  if (const int rc = load_model_from(doc, config_path, model)) return rc;
  if (!doc.contains("learned")) return fail_config("config needs a \"learned\" path");
  LearnedHandle learned;
  const std::string learned_path = resolve(doc, "learned", config_path);
  if (const auto st = gridgp_learned_load(learned_path.c_str(), model.ptr, &learned.ptr)) {
    return fail(st);
  }
  const json clustering = doc.value("clustering", json::object());
  const int n = gridgp_model_size(model.ptr);
  const int k = clustering.value("k", std::max(2, (n + 5) / 10));

  ClustersHandle clusters;
  if (const auto st = gridgp_cluster(learned.ptr, k, seed.value_or(0), &clusters.ptr)) {
    return fail(st);
  }
  fs::create_directories(out_dir);
  const std::string out_path = (fs::path(out_dir) / "clusters.json").string();
  if (const auto st = gridgp_clusters_save(clusters.ptr, model.ptr, out_path.c_str())) {
    return fail(st);
  }
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridgp: robust Gaussian-process learning of power-grid dynamics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  app.add_option("--threads", threads, "worker threads for parallel sections")->capture_default_str();

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", config_path, "JSON config file");
    if (needs_config) opt->required();
    cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
    cmd->add_option("--seed", seed, "override the configured seed");
  };

  auto* simulate = app.add_subcommand("simulate", "integrate the swing SDE and write series");
  add_common(simulate, true);
  auto* corrupt = app.add_subcommand("corrupt", "inject a corruption plan into a series");
  add_common(corrupt, true);
  auto* learn = app.add_subcommand("learn", "fit the covariance parameter matrix A");
  add_common(learn, true);
  auto* identify = app.add_subcommand("identify", "locate corrupted meters via sparse weights");
  add_common(identify, true);
  auto* infer = app.add_subcommand("infer", "predict non-metered generator speeds");
  add_common(infer, true);
  auto* cluster = app.add_subcommand("cluster", "k-medoids grouping by learned correlation");
  add_common(cluster, true);

  auto* bench = app.add_subcommand("bench", "scenario benchmarks");
  bench->require_subcommand(1);
  std::string scenario_path;
  auto* bench_run = bench->add_subcommand("run", "run one scenario end to end");
  bench_run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  bench_run->add_option("--out", out_dir, "output directory")->capture_default_str();
  bench_run->add_option("--seed", seed, "override the scenario seed");
  bench_run->add_option("--config", config_path, "unused; scenarios are self-contained");
  auto* bench_suite = bench->add_subcommand("suite", "run the bundled desk-scale suite");
  bench_suite->add_option("--out", out_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(GRIDGP_ERR_CONFIG);
  }

  gridgp_set_threads(threads);

  if (bench_run->parsed()) {
    const auto st = gridgp_run_scenario(scenario_path.c_str(), out_dir.c_str(),
                                        seed.value_or(0), seed.has_value() ? 1 : 0);
    if (st != GRIDGP_OK) return fail(st);
    std::printf("scenario complete: %s\n", out_dir.c_str());
    return 0;
  }
  if (bench_suite->parsed()) {
    const auto st = gridgp_bench_suite(out_dir.c_str());
    if (st != GRIDGP_OK) return fail(st);
    std::printf("suite complete: %s\n", out_dir.c_str());
    return 0;
  }

  int rc = 0;
  const json doc = load_config(config_path, rc);
  if (rc != 0) return rc;

  if (simulate->parsed()) return cmd_simulate(doc, config_path, out_dir, seed);
  if (corrupt->parsed()) return cmd_corrupt(doc, config_path, out_dir, seed);
  if (learn->parsed()) return cmd_learn(doc, config_path, out_dir);
  if (identify->parsed()) return cmd_identify(doc, config_path, out_dir);
  if (infer->parsed()) return cmd_infer(doc, config_path, out_dir);
  if (cluster->parsed()) return cmd_cluster(doc, config_path, out_dir, seed);
  return fail_config("no subcommand");
}
