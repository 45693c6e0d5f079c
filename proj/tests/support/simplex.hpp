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

// Test-only linear programming oracle: dense two-phase tableau simplex with
// Bland's rule, plus the epigraph reformulation of least-absolute-deviations
// regression. Independent of the production L1 solver.

#pragma once

#include "gridgp/common.hpp"

namespace gridgp::oracles {

struct LpResult {
  bool optimal{false};
  double objective{0.0};
  Vector x;
};

// min c'x subject to A x = b, x >= 0.
LpResult simplex_solve(const Vector& c, const Matrix& a, const Vector& b, int max_iterations = 50000);

// min ||design * a - rhs||_1 via the epigraph LP
//   min sum t  s.t.  -t <= design*a - rhs <= t.
// Returns the optimal objective (and optionally the minimizer).
double l1_regression_optimum(const Matrix& design, const Vector& rhs, Vector* minimizer = nullptr);

}  // namespace gridgp::oracles
