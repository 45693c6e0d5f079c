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

#include "gridgp/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "gridgp/errors.hpp"
#include "gridgp/simulator.hpp"

namespace gridgp {

namespace {

void check_targets(const TimeSeriesRecord& record, const CorruptionPlan& plan) {
  if (plan.target_meters.empty()) throw ConfigError("corruption plan has no target meters");
  const std::set<int> meters(record.meter_set.begin(), record.meter_set.end());
  for (int t : plan.target_meters) {
    if (!meters.count(t)) {
      throw ConfigError("corruption target generator index " + std::to_string(t) +
                        " is not in the record's meter set");
    }
  }
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::string to_string(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::false_data_injection: return "false_data_injection";
    case CorruptionKind::gross_errors: return "gross_errors";
    case CorruptionKind::clock_drift: return "clock_drift";
  }
  return "unknown";
}

CorruptionKind corruption_kind_from_string(const std::string& name) {
  if (name == "false_data_injection" || name == "fdi") return CorruptionKind::false_data_injection;
  if (name == "gross_errors" || name == "gross") return CorruptionKind::gross_errors;
  if (name == "clock_drift" || name == "drift") return CorruptionKind::clock_drift;
  throw ConfigError("unknown corruption kind: " + name);
}

CorruptionResult inject_fdi(const TimeSeriesRecord& record, const GridModel& model,
                            const CorruptionPlan& plan) {
  if (plan.kind != CorruptionKind::false_data_injection) {
    throw ConfigError("inject_fdi called with a plan of kind " + to_string(plan.kind));
  }
  check_targets(record, plan);
  if (!record.metadata.contains("sim_config")) {
    throw ConfigError(
        "false data injection needs the original simulation config in the record metadata "
        "to run the perturbed parallel simulation");
  }

  // Perturbed system: scaled intensity, a fresh input realization, and a
  // diagonal loading perturbation applied as a congruence so the perturbed
  // network matrix stays symmetric PSD. At scale 0 the parallel run keeps
  // the original seed and reproduces the record exactly.
  SimulationConfig parallel = sim_config_from_json(record.metadata.at("sim_config"), model.n);
  parallel.noise_intensity *= (1.0 + 0.5 * plan.fdi_scale);
  if (plan.fdi_scale != 0.0) parallel.seed = mix_seed(parallel.seed, plan.seed + 1);

  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vector scale_diag(model.n);
  for (int i = 0; i < model.n; ++i) scale_diag[i] = 1.0 + 0.05 * plan.fdi_scale * unit(rng);

  GridModel perturbed = model;
  perturbed.laplacian = scale_diag.asDiagonal() * model.laplacian * scale_diag.asDiagonal();
  perturbed.laplacian = 0.5 * (perturbed.laplacian + perturbed.laplacian.transpose());

  const TimeSeriesRecord fake = simulate(perturbed, parallel);
  if (fake.ticks() != record.ticks()) {
    throw NumericError("false data injection: parallel simulation tick count mismatch");
  }

  TimeSeriesRecord out = record;
  for (int gen : plan.target_meters) {
    const int col = record.column_of(gen);
    out.values.col(col) = fake.values.col(fake.column_of(gen));
  }
  out.metadata["corruption"] = to_string(plan.kind);

  TruthLabels labels;
  labels.kind = plan.kind;
  labels.corrupted = sorted_unique(plan.target_meters);
  labels.details = {{"scale", plan.fdi_scale}, {"seed", plan.seed}};
  return {std::move(out), std::move(labels)};
}

CorruptionResult inject_gross_errors(const TimeSeriesRecord& record, const CorruptionPlan& plan) {
  if (plan.kind != CorruptionKind::gross_errors) {
    throw ConfigError("inject_gross_errors called with a plan of kind " + to_string(plan.kind));
  }
  check_targets(record, plan);
  if (plan.gross_count < 0) throw ConfigError("gross error count must be nonnegative");
  const long slots = static_cast<long>(plan.target_meters.size()) * record.ticks();
  if (plan.gross_count > slots) {
    throw ConfigError("gross error count " + std::to_string(plan.gross_count) +
                      " exceeds the " + std::to_string(slots) + " available positions");
  }

  TimeSeriesRecord out = record;
  TruthLabels labels;
  labels.kind = plan.kind;
  labels.details["positions"] = nlohmann::json::array();

  std::mt19937_64 rng(plan.seed);
  std::uniform_int_distribution<long> slot_draw(0, slots - 1);
  std::set<long> used;
  std::vector<int> touched;
  while (static_cast<int>(used.size()) < plan.gross_count) {
    const long slot = slot_draw(rng);
    if (!used.insert(slot).second) continue;
    const int gen = plan.target_meters[slot / record.ticks()];
    const int tick = static_cast<int>(slot % record.ticks());
    const double sign = (rng() & 1) ? 1.0 : -1.0;
    out.values(tick, record.column_of(gen)) += sign * plan.gross_magnitude;
    touched.push_back(gen);
    labels.details["positions"].push_back({{"generator", gen}, {"tick", tick},
                                           {"delta", sign * plan.gross_magnitude}});
  }
  labels.corrupted = sorted_unique(touched);
  if (plan.gross_count > 0) out.metadata["corruption"] = to_string(plan.kind);
  return {std::move(out), std::move(labels)};
}

CorruptionResult inject_clock_drift(const TimeSeriesRecord& record, const CorruptionPlan& plan) {
  if (plan.kind != CorruptionKind::clock_drift) {
    throw ConfigError("inject_clock_drift called with a plan of kind " + to_string(plan.kind));
  }
  check_targets(record, plan);
  if (!(plan.drift_rate >= 0.0)) throw ConfigError("drift rate must be nonnegative");
  if (!(plan.drift_resync_period > 0.0)) throw ConfigError("resync period must be positive");

  TruthLabels labels;
  labels.kind = plan.kind;
  labels.corrupted = sorted_unique(plan.target_meters);
  labels.details = {{"drift_rate", plan.drift_rate}, {"resync_period", plan.drift_resync_period}};

  if (plan.drift_rate == 0.0) return {record, std::move(labels)};

  const double duration = (record.ticks() - 1) / record.reporting_rate;
  const double max_offset = plan.drift_rate * plan.drift_resync_period;
  if (max_offset >= duration) {
    throw ConfigError("clock drift offset (" + format_double(max_offset) +
                      " s per cycle) exceeds the record duration " + format_double(duration) + " s");
  }

  TimeSeriesRecord out = record;
  const double rate = record.reporting_rate;
  const double ticks_per_cycle = plan.drift_resync_period * rate;
  const int last = record.ticks() - 1;
  for (int gen : plan.target_meters) {
    const int col = record.column_of(gen);
    for (int k = 0; k <= last; ++k) {
      const long cycle = static_cast<long>(std::floor(k / ticks_per_cycle + 1e-12));
      const double in_cycle = (k - cycle * ticks_per_cycle) / rate;
      // Local clock runs fast: the sample reported for tick k was actually
      // taken drift_rate * (time since resync) later. Interpolate the true
      // signal linearly between reporting ticks, clamped to the record span.
      double query_ticks = k + plan.drift_rate * in_cycle * rate;
      query_ticks = std::clamp(query_ticks, 0.0, static_cast<double>(last));
      const int lo = static_cast<int>(query_ticks);
      const int hi = std::min(lo + 1, last);
      const double frac = query_ticks - lo;
      out.values(k, col) = (1.0 - frac) * record.values(lo, col) + frac * record.values(hi, col);
    }
  }
  out.metadata["corruption"] = to_string(plan.kind);
  return {std::move(out), std::move(labels)};
}

CorruptionResult inject(const TimeSeriesRecord& record, const GridModel* model,
                        const CorruptionPlan& plan) {
  switch (plan.kind) {
    case CorruptionKind::false_data_injection:
      if (!model) throw ConfigError("false data injection requires the grid model");
      return inject_fdi(record, *model, plan);
    case CorruptionKind::gross_errors:
      return inject_gross_errors(record, plan);
    case CorruptionKind::clock_drift:
      return inject_clock_drift(record, plan);
  }
  throw ConfigError("unknown corruption kind");
}

CorruptionPlan corruption_plan_from_json(const nlohmann::json& doc) {
  CorruptionPlan plan;
  try {
    plan.kind = corruption_kind_from_string(doc.at("kind").get<std::string>());
    plan.target_meters = doc.at("target_meters").get<std::vector<int>>();
    plan.seed = doc.value("seed", std::uint64_t{0});
    plan.fdi_scale = doc.value("scale", 1.0);
    plan.gross_count = doc.value("count", 0);
    plan.gross_magnitude = doc.value("magnitude", 0.0);
    plan.drift_rate = doc.value("drift_rate", 0.0);
    plan.drift_resync_period = doc.value("resync_period", 1.0);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("corruption plan malformed: ") + e.what());
  }
  return plan;
}

nlohmann::json labels_to_json(const TruthLabels& labels, const GridModel& model) {
  nlohmann::json doc;
  doc["format"] = "gridgp-labels-v1";
  doc["kind"] = to_string(labels.kind);
  doc["corrupted"] = labels.corrupted;
  std::vector<int> ids;
  for (int g : labels.corrupted) ids.push_back(model.generator_ids[g]);
  doc["corrupted_ids"] = ids;
  doc["details"] = labels.details;
  return doc;
}

}  // namespace gridgp
