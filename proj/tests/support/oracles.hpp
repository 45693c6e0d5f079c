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

// Independent reference computations used only by tests. None of these share
// code with the implementation paths they check.

#pragma once

#include <cstdint>
#include <vector>

#include "gridgp/common.hpp"

namespace gridgp::oracles {

// Monte-Carlo estimate of the stationary velocity cross-covariance
// E[v_i(t+tau) v_j(t)] for two second-order systems driven by one shared
// unit white noise. Uses exact discretization (matrix exponential and the
// Van Loan construction for the step covariance), so the only error is
// Monte-Carlo noise. `steps` correlated draws give roughly steps/4 effective
// samples at the default step.
struct MonteCarloResult {
  double value;
  double std_error;  // batch-means estimate
};
MonteCarloResult mc_velocity_cross_covariance(double gamma, double lambda_i, double lambda_j,
                                              double tau, long steps, std::uint64_t seed);

// Dense Schur complement via an explicit linear solve, for checking Kron
// reduction.
Matrix dense_schur_complement(const Matrix& full, const std::vector<int>& keep);

// Exhaustive minimization of the masked identification objective over all
// 2^m binary weight vectors. Returns the best w.
std::vector<bool> exhaustive_mask_search(const Matrix& abs_residual_stack, double beta);
double masked_binary_objective(const Matrix& abs_residual_stack, const std::vector<bool>& w,
                               double beta);

}  // namespace gridgp::oracles
