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

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridgp/grid_model.hpp"
#include "gridgp/time_series.hpp"

namespace gridgp {

enum class CorruptionKind {
  false_data_injection,
  gross_errors,
  clock_drift,
};

std::string to_string(CorruptionKind kind);
CorruptionKind corruption_kind_from_string(const std::string& name);

struct CorruptionPlan {
  CorruptionKind kind{CorruptionKind::gross_errors};
  std::vector<int> target_meters;  // generator indices, nonempty subset of meter_set

  // false_data_injection: at scale s the parallel simulation runs with the
  // same noise realization, Q scaled by (1 + 0.5*s) and a random +-10%*s
  // diagonal loading perturbation of L. scale 0 reproduces the input.
  double fdi_scale{1.0};

  // gross_errors
  int gross_count{0};
  double gross_magnitude{0.0};

  // clock_drift
  double drift_rate{0.0};          // seconds of offset per second
  double drift_resync_period{1.0}; // seconds between resynchronization pulses

  std::uint64_t seed{0};
};

struct TruthLabels {
  CorruptionKind kind{CorruptionKind::gross_errors};
  std::vector<int> corrupted;  // generator indices of modified columns
  nlohmann::json details;
};

using CorruptionResult = std::pair<TimeSeriesRecord, TruthLabels>;

CorruptionResult inject_fdi(const TimeSeriesRecord& record, const GridModel& model,
                            const CorruptionPlan& plan);
CorruptionResult inject_gross_errors(const TimeSeriesRecord& record, const CorruptionPlan& plan);
CorruptionResult inject_clock_drift(const TimeSeriesRecord& record, const CorruptionPlan& plan);

// Dispatch on plan.kind; model may be null except for false data injection.
CorruptionResult inject(const TimeSeriesRecord& record, const GridModel* model,
                        const CorruptionPlan& plan);

CorruptionPlan corruption_plan_from_json(const nlohmann::json& doc);
nlohmann::json labels_to_json(const TruthLabels& labels, const GridModel& model);

}  // namespace gridgp
