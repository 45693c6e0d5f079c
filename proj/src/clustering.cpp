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

#include "gridgp/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gridgp/errors.hpp"

namespace gridgp {

std::vector<int> ClusterAssignment::members_of(int cluster) const {
  std::vector<int> out;
  for (size_t g = 0; g < membership.size(); ++g) {
    if (membership[g] == cluster) out.push_back(static_cast<int>(g));
  }
  return out;
}

Matrix correlation_distances(const LearnedCovariance& learned) {
  std::vector<int> all(learned.model.n);
  for (int i = 0; i < learned.model.n; ++i) all[i] = i;
  const Matrix sigma0 = sigma_of_A(learned, 0.0, all);
  const Vector stds = sigma0.diagonal().cwiseMax(0.0).cwiseSqrt();
  const int n = learned.model.n;
  Matrix d(n, n);
  for (int i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double denom = stds[i] * stds[j];
      const double rho = denom > 1e-300 ? sigma0(i, j) / denom : 0.0;
      const double dist = std::clamp(1.0 - std::abs(rho), 0.0, 1.0);
      d(i, j) = dist;
      d(j, i) = dist;
    }
  }
  return d;
}

ClusterAssignment pam_cluster(const Matrix& distances, int k) {
  const int n = static_cast<int>(distances.rows());
  if (distances.cols() != n) throw ConfigError("pam_cluster: distance matrix must be square");
  if (k < 1) throw ConfigError("pam_cluster: k must be at least 1");
  if (k > n) {
    throw ConfigError("pam_cluster: k=" + std::to_string(k) + " exceeds the " + std::to_string(n) +
                      " points");
  }

  std::vector<int> medoids;
  std::vector<char> is_medoid(n, 0);

  // BUILD: greedily add the medoid with the largest cost reduction.
  {
    int first = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < n; ++c) {
      const double total = distances.col(c).sum();
      if (total < best) {
        best = total;
        first = c;
      }
    }
    medoids.push_back(first);
    is_medoid[first] = 1;
    Vector nearest = distances.col(first);
    while (static_cast<int>(medoids.size()) < k) {
      int pick = -1;
      double pick_gain = -1.0;
      for (int c = 0; c < n; ++c) {
        if (is_medoid[c]) continue;
        double gain = 0.0;
        for (int j = 0; j < n; ++j) gain += std::max(0.0, nearest[j] - distances(j, c));
        if (gain > pick_gain + 1e-15) {
          pick_gain = gain;
          pick = c;
        }
      }
      if (pick < 0) {  // all remaining gains are zero; take the lowest index
        for (int c = 0; c < n && pick < 0; ++c) {
          if (!is_medoid[c]) pick = c;
        }
      }
      medoids.push_back(pick);
      is_medoid[pick] = 1;
      nearest = nearest.cwiseMin(distances.col(pick));
    }
  }

  // SWAP: best-improvement scans until no swap lowers the total cost.
  auto total_cost = [&](const std::vector<int>& meds) {
    double cost = 0.0;
    for (int j = 0; j < n; ++j) {
      double d = std::numeric_limits<double>::infinity();
      for (int m : meds) d = std::min(d, distances(j, m));
      cost += d;
    }
    return cost;
  };
  double cost = total_cost(medoids);
  for (int round = 0; round < 200; ++round) {
    double best_delta = -1e-12;
    int best_m = -1, best_h = -1;
    for (size_t mi = 0; mi < medoids.size(); ++mi) {
      for (int h = 0; h < n; ++h) {
        if (is_medoid[h]) continue;
        std::vector<int> trial = medoids;
        trial[mi] = h;
        const double delta = total_cost(trial) - cost;
        if (delta < best_delta) {
          best_delta = delta;
          best_m = static_cast<int>(mi);
          best_h = h;
        }
      }
    }
    if (best_m < 0) break;
    is_medoid[medoids[best_m]] = 0;
    is_medoid[best_h] = 1;
    medoids[best_m] = best_h;
    cost += best_delta;
  }

  ClusterAssignment assignment;
  assignment.k = k;
  assignment.medoids = medoids;
  assignment.distances = distances;
  assignment.membership.resize(n);
  assignment.cost = 0.0;
  for (int j = 0; j < n; ++j) {
    int best = 0;
    for (int c = 1; c < k; ++c) {
      if (distances(j, medoids[c]) < distances(j, medoids[best])) best = c;
    }
    assignment.membership[j] = best;
    assignment.cost += distances(j, medoids[best]);
  }
  return assignment;
}

ClusterAssignment cluster_generators(const LearnedCovariance& learned, int k, std::uint64_t seed) {
  (void)seed;
  if (k > learned.model.n) {
    throw ConfigError("cluster_generators: k=" + std::to_string(k) + " exceeds the " +
                      std::to_string(learned.model.n) + " generators");
  }
  return pam_cluster(correlation_distances(learned), k);
}

int default_cluster_count(int n) { return std::max(2, (n + 5) / 10); }

namespace {

struct ClusterTask {
  std::vector<int> conditioning;    // surviving meters in the cluster
  std::vector<TargetSpec> targets;
  std::vector<int> output_slots;    // column in the stitched prediction
};

std::vector<int> surviving_meters(const TimeSeriesRecord& record, const MeterWeights* weights) {
  if (!weights) return record.meter_set;
  std::vector<int> out;
  for (int m : record.meter_set) {
    bool drop = false;
    for (size_t i = 0; i < weights->meters.size(); ++i) {
      if (weights->meters[i] == m && weights->binarized[i]) drop = true;
    }
    if (!drop) out.push_back(m);
  }
  return out;
}

}  // namespace

Prediction infer_dimension_reduced(const LearnedCovariance& learned, const TimeSeriesRecord& record,
                                   const MeterWeights* weights, const std::vector<int>& targets,
                                   const ClusterAssignment& assignment,
                                   const PredictOptions& options) {
  if (targets.empty()) throw ConfigError("infer_dimension_reduced: target set is empty");
  const std::vector<int> meters = surviving_meters(record, weights);
  const std::set<int> meter_set(meters.begin(), meters.end());

  std::vector<ClusterTask> tasks(assignment.k);
  std::vector<int> meterless_targets;
  for (size_t idx = 0; idx < targets.size(); ++idx) {
    const int gen = targets[idx];
    if (meter_set.count(gen)) {
      throw ConfigError("infer_dimension_reduced: target " + std::to_string(gen) + " is metered");
    }
    const int cluster = assignment.membership.at(gen);
    ClusterTask& task = tasks[cluster];
    if (task.conditioning.empty()) {
      for (int m : meters) {
        if (assignment.membership.at(m) == cluster) task.conditioning.push_back(m);
      }
    }
    if (task.conditioning.empty()) {
      meterless_targets.push_back(gen);
      continue;
    }
    task.targets.push_back(
        {{{gen, 1.0}}, "g" + std::to_string(learned.model.generator_ids[gen]), gen});
    task.output_slots.push_back(static_cast<int>(idx));
  }
  if (!meterless_targets.empty()) {
    std::ostringstream msg;
    msg << "infer_dimension_reduced: no surviving meter shares a cluster with target(s)";
    for (int g : meterless_targets) msg << " " << g;
    msg << "; consider falling back to full conditioning for them";
    throw ConfigError(msg.str());
  }

  Prediction out;
  out.window_start = options.window_start;
  out.mean.resize(options.window_ticks, static_cast<int>(targets.size()));
  if (options.with_std) out.stddev.resize(options.window_ticks, static_cast<int>(targets.size()));
  out.target_columns.resize(targets.size());
  out.labels.resize(targets.size());

  for (const auto& task : tasks) {
    if (task.targets.empty()) continue;
    const Prediction part =
        predict_with_conditioning(learned, record, task.conditioning, task.targets, options);
    for (size_t c = 0; c < task.output_slots.size(); ++c) {
      const int slot = task.output_slots[c];
      out.mean.col(slot) = part.mean.col(static_cast<int>(c));
      if (options.with_std) out.stddev.col(slot) = part.stddev.col(static_cast<int>(c));
      out.target_columns[slot] = part.target_columns[c];
      out.labels[slot] = part.labels[c];
    }
  }
  return out;
}

Prediction infer_aggregate(const LearnedCovariance& learned, const TimeSeriesRecord& record,
                           const MeterWeights* weights, const std::vector<int>& targets,
                           const ClusterAssignment& assignment, const PredictOptions& options) {
  if (targets.empty()) throw ConfigError("infer_aggregate: target set is empty");
  const std::vector<int> meters = surviving_meters(record, weights);
  const std::set<int> meter_set(meters.begin(), meters.end());

  Prediction out;
  out.window_start = options.window_start;
  std::vector<Matrix> columns;
  std::vector<Matrix> std_columns;

  for (int cluster = 0; cluster < assignment.k; ++cluster) {
    std::vector<std::pair<int, double>> combo;
    double total_inertia = 0.0;
    for (int gen : targets) {
      if (assignment.membership.at(gen) != cluster) continue;
      if (meter_set.count(gen)) {
        throw ConfigError("infer_aggregate: target " + std::to_string(gen) + " is metered");
      }
      combo.push_back({gen, learned.model.inertia[gen]});
      total_inertia += learned.model.inertia[gen];
    }
    if (combo.empty()) continue;
    for (auto& [gen, weight] : combo) weight /= total_inertia;

    std::vector<int> conditioning;
    for (int m : meters) {
      if (assignment.membership.at(m) == cluster) conditioning.push_back(m);
    }
    if (conditioning.empty()) {
      throw ConfigError("infer_aggregate: cluster " + std::to_string(cluster) +
                        " has targets but no surviving meter; consider full conditioning");
    }

    TargetSpec spec;
    spec.combo = combo;
    spec.label = "cluster" + std::to_string(cluster);
    spec.column = assignment.medoids[cluster];  // stable id for the equivalent
    const Prediction part = predict_with_conditioning(learned, record, conditioning, {spec}, options);
    columns.push_back(part.mean);
    if (options.with_std) std_columns.push_back(part.stddev);
    out.target_columns.push_back(-1);
    out.labels.push_back(spec.label);
  }
  if (columns.empty()) {
    throw ConfigError("infer_aggregate: no cluster contains a target");
  }

  out.mean.resize(options.window_ticks, static_cast<int>(columns.size()));
  for (size_t c = 0; c < columns.size(); ++c) out.mean.col(static_cast<int>(c)) = columns[c];
  if (options.with_std) {
    out.stddev.resize(options.window_ticks, static_cast<int>(std_columns.size()));
    for (size_t c = 0; c < std_columns.size(); ++c) {
      out.stddev.col(static_cast<int>(c)) = std_columns[c];
    }
  }
  return out;
}

nlohmann::json assignment_to_json(const ClusterAssignment& assignment, const GridModel& model) {
  nlohmann::json doc;
  doc["format"] = "gridgp-clusters-v1";
  doc["k"] = assignment.k;
  doc["cost"] = assignment.cost;
  std::vector<int> medoid_ids;
  for (int m : assignment.medoids) medoid_ids.push_back(model.generator_ids[m]);
  doc["medoids"] = assignment.medoids;
  doc["medoid_ids"] = medoid_ids;
  nlohmann::json membership = nlohmann::json::object();
  for (size_t g = 0; g < assignment.membership.size(); ++g) {
    membership["g" + std::to_string(model.generator_ids[g])] = assignment.membership[g];
  }
  doc["assignment"] = membership;
  return doc;
}

}  // namespace gridgp
