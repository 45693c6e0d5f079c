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

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gridgp/common.hpp"

namespace gridgp {

/// Linearized swing-equation system M*dw/dt + gamma*M*w + L*theta = p(t).
/// Damping is uniform by assumption: D = gamma * M. The laplacian is the
/// Kron-reduced network matrix over generators only (symmetric, PSD up to
/// numerical slack, typically with one near-zero eigenvalue for the
/// rigid-body angle mode).
struct GridModel {
  int n{0};
  Vector inertia;                  // diagonal of M, per-unit * s^2, > 0
  double damping_ratio{0.0};       // gamma, 1/s
  Matrix laplacian;                // n x n, per-unit
  std::vector<int> generator_ids;  // stable labels, one per generator

  // Throws ConfigError/NumericError when an invariant is violated.
  void validate() const;
  int index_of_id(int generator_id) const;  // -1 when absent
};

/// Orthonormal eigenbasis of M^{-1/2} L M^{-1/2}. Diagonalizing the network
/// turns the MIMO swing system into independent scalar oscillators
/// y_i'' + gamma y_i' + lambda_i y_i = x_i.
struct EigenBasis {
  Matrix V;                         // n x n, columns are eigenvectors
  Vector lambda;                    // ascending, 1/s^2
  double gamma{0.0};
  std::vector<int> retained_modes;  // indices into lambda after bandpass

  int n() const { return static_cast<int>(lambda.size()); }
  int r() const { return static_cast<int>(retained_modes.size()); }
};

// Schur complement eliminating all buses not in generator_buses.
// Result rows/columns follow the order of generator_buses.
Matrix kron_reduce(const Matrix& full_laplacian, const std::vector<int>& generator_buses);

EigenBasis eigen_decompose(const GridModel& model);

// Damped natural frequency of a mode, sqrt(max(lambda - gamma^2/4, 0)) / 2pi.
// This is the oscillation frequency visible in data; compare with the
// undamped sqrt(lambda)/2pi when interpreting band edges.
double damped_frequency_hz(double lambda, double gamma);

// Keeps modes whose damped frequency lies in [f_lo, f_hi] Hz.
EigenBasis select_modes(const EigenBasis& basis, double f_lo_hz, double f_hi_hz);

GridModel model_from_json(const nlohmann::json& doc);
nlohmann::json model_to_json(const GridModel& model);
GridModel load_model(const std::string& path);
void save_model(const GridModel& model, const std::string& path);

}  // namespace gridgp
