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

#include "gridgp/covariance.hpp"

namespace gridgp {

struct FitConfig {
  enum class Objective { l2, l1 };
  Objective objective{Objective::l1};
  std::vector<double> lags{0.0};  // seconds
  int max_iterations{200};
  double tolerance{1e-9};  // relative objective decrease
  bool symmetry{true};     // A is always fitted symmetric
  // Relative singular-value cutoff for the numerical rank of the design.
  // Directions below it are invisible at the metered locations at sampling
  // noise scale and are pinned to zero (minimum-norm convention).
  double rank_threshold{3e-3};
};

struct FitReport {
  double objective{0.0};  // at the solution, correlation-normalized units
  std::vector<double> objective_trajectory;
  int iterations{0};
  int design_rank{0};
  int unknowns{0};
  std::vector<std::string> warnings;
  std::vector<Matrix> residuals;  // Sigma_tau(A) - C_tau per lag, normalized
  std::vector<double> lags;
};

struct FitResult {
  LearnedCovariance learned;
  FitReport report;
};

/// The moment-matching problem in stacked form: rows are (lag, p, q) entries
/// of vec(Sigma_tau(A) - C_tau) scaled to correlation units, columns are the
/// packed upper triangle of symmetric A. Sigma_tau is linear in A, so both
/// objectives reduce to ||design * a - rhs|| in the respective norm.
struct FitProblem {
  Matrix design;
  Vector rhs;
  int modes{0};
  int meters{0};
  std::vector<double> lags;
};

FitProblem build_fit_problem(const Moments& moments, const KernelTensor& kernel,
                             const EigenBasis& basis, const GridModel& model, const Vector& stds);

int packed_size(int modes);
Matrix unpack_symmetric(const Vector& packed, int modes);
Vector pack_symmetric(const Matrix& a);

FitResult fit_l2(const Moments& moments, const KernelTensor& kernel, const EigenBasis& basis,
                 const GridModel& model, const FitConfig& config);

// Least-absolute-value fit, Sigma over lags of ||vec(Sigma_tau(A) - C_tau)||_1.
// Iteratively reweighted least squares with an epsilon ladder, then an exact
// piecewise-linear polish (coordinate and random-direction weighted-median
// searches plus an active-set snap).
FitResult fit_l1(const Moments& moments, const KernelTensor& kernel, const EigenBasis& basis,
                 const GridModel& model, const FitConfig& config);

// Solver cores on an assembled problem (also used with row-masked problems).
Vector solve_l2_problem(const FitProblem& problem, const FitConfig& config, FitReport& report);
Vector solve_l1_problem(const FitProblem& problem, const FitConfig& config, FitReport& report);

double l1_objective(const FitProblem& problem, const Vector& a);

nlohmann::json fit_report_to_json(const FitReport& report);

}  // namespace gridgp
