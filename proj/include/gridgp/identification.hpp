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

#include <utility>
#include <vector>

#include "gridgp/learning.hpp"
#include "gridgp/time_series.hpp"

namespace gridgp {

/// Per-meter corruption weights. w_i = 0 marks a good meter, w_i = 1 a
/// corrupted one; binarization uses a strict w_i > 0.5 (ties count as good).
struct MeterWeights {
  Vector w;                    // in [0, 1]
  double beta{0.0};
  std::vector<bool> binarized; // w_i > threshold
  double threshold{0.5};
  double objective{0.0};
  std::vector<int> meters;     // generator indices aligned with w

  std::vector<int> flagged() const;  // generator indices with binarized = true
};

// W = w w^T + w (1-w)^T + (1-w) w^T and M = 1 - W. For w in [0,1]^m this
// reduces to M[i,j] = (1-w_i)(1-w_j): an entry of the moment residual is
// trusted exactly when both meters are.
std::pair<Matrix, Matrix> build_mask(const Vector& w);

struct IdentifyConfig {
  double beta{0.8};
  int restarts{8};        // random restarts in addition to the all-zeros start
  int max_iterations{500};
  double tolerance{1e-12};
  int alternating_rounds{0};  // optional refit-A / re-identify rounds
};

// Minimizes sum_tau ||vec((Sigma_tau(A) - C_tau) o M)||_1 + beta ||w||_1
// over w in [0,1]^m with A frozen from the robust fit. The masked term is
// quadratic in w, so each start runs projected gradient descent followed by
// exact coordinate minimization; the best restart wins (ties by index).
MeterWeights identify(const Moments& moments, const LearnedCovariance& learned,
                      const IdentifyConfig& config);

TimeSeriesRecord apply_mask_to_inference_inputs(const TimeSeriesRecord& record,
                                                const MeterWeights& weights);

nlohmann::json weights_to_json(const MeterWeights& weights, const GridModel& model);

}  // namespace gridgp
