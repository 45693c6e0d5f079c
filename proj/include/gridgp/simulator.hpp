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
#include <optional>

#include <nlohmann/json_fwd.hpp>

#include "gridgp/grid_model.hpp"
#include "gridgp/time_series.hpp"

namespace gridgp {

/// Euler-Maruyama integration settings. `duration` is the retained window:
/// the integrator first runs a burn-in of `burn_in` seconds (default
/// min(20/gamma, duration), i.e. roughly ten damping time constants capped
/// at half the total run) that is discarded, then reports `duration *
/// reporting_rate` ticks.
struct SimulationConfig {
  double integration_step{1e-4};  // seconds
  double duration{10.0};          // seconds of retained data
  double reporting_rate{240.0};   // samples / second
  Matrix noise_intensity;         // n x n symmetric PSD intensity of p(t)
  std::uint64_t seed{0};
  std::optional<double> burn_in;  // seconds; explicit values must be <= duration
  Vector initial_speed;           // empty = start from rest

  void validate(int n) const;
  double resolved_burn_in(double gamma) const;
};

// Integrates theta' = omega, M omega' = -gamma M omega - L theta + p with
// p white noise of intensity Q, then decimates to the reporting rate
// (sample-and-hold at the nearest integration step). Returns all n columns.
TimeSeriesRecord simulate(const GridModel& model, const SimulationConfig& config);

SimulationConfig sim_config_from_json(const nlohmann::json& doc, int n);
nlohmann::json sim_config_to_json(const SimulationConfig& config);

}  // namespace gridgp
