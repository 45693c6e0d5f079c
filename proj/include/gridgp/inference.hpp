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
#include <utility>
#include <vector>

#include "gridgp/covariance.hpp"
#include "gridgp/identification.hpp"
#include "gridgp/time_series.hpp"

namespace gridgp {

/// Stacked space-time covariance over an observation window. Index layout is
/// time-major: entry (t*m + i, s*m + j) = Sigma_{(t-s)*delta}(A)[i, j], which
/// makes sigma11 block-Toeplitz with m x m blocks. Means are zero under the
/// ambient (centered, stationary) model.
struct JointBlocks {
  Matrix sigma11;  // (m*T) x (m*T), base jitter already on the diagonal
  Matrix sigma21;  // (targets*T) x (m*T)
  Matrix sigma22;  // (targets*T) x (targets*T); empty when not requested
  Vector mu1, mu2;
  double jitter{0.0};
  int ticks{0};
  std::vector<int> meters, targets;  // generator indices
  double tick_interval{0.0};
};

JointBlocks assemble_blocks(const LearnedCovariance& learned, const std::vector<int>& meters,
                            const std::vector<int>& targets, int ticks, double tick_interval,
                            bool with_target_block = true);

// mu2 + Sigma21 Sigma11^-1 (x1 - mu1) via Cholesky (never an explicit
// inverse). Escalates the diagonal jitter up to 1e-4 relative before failing.
Vector conditional_mean(const JointBlocks& blocks, const Vector& x1);

// Schur complement Sigma22 - Sigma21 Sigma11^-1 Sigma21^T.
Matrix conditional_cov(const JointBlocks& blocks);

struct PredictOptions {
  int window_ticks{250};
  int window_start{0};
  bool with_std{false};
};

struct Prediction {
  Matrix mean;                       // window x targets
  Matrix stddev;                     // window x targets, empty unless requested
  std::vector<int> target_columns;   // generator index per column
  std::vector<std::string> labels;   // display labels (aggregates get names)
  int window_start{0};
};

// A prediction target: a generator, or a weighted combination of generators
// (used for cluster aggregates; conditioning is linear, so combinations are
// exact).
struct TargetSpec {
  std::vector<std::pair<int, double>> combo;  // (generator index, weight)
  std::string label;
  int column{-1};  // generator index for plain targets, -1 for aggregates
};

// Shared conditioning core: one Cholesky of the conditioning meters' window
// covariance, then one cross-covariance row block per target.
Prediction predict_with_conditioning(const LearnedCovariance& learned,
                                     const TimeSeriesRecord& record,
                                     const std::vector<int>& conditioning_meters,
                                     const std::vector<TargetSpec>& targets,
                                     const PredictOptions& options);

// Masked full-window inference for non-metered generators: drops flagged
// meters (weights may be null), conditions on the surviving ones.
Prediction predict_nonmetered(const LearnedCovariance& learned, const TimeSeriesRecord& record,
                              const MeterWeights* weights, const std::vector<int>& targets,
                              const PredictOptions& options);

void save_prediction_csv(const Prediction& prediction, const GridModel& model,
                         double reporting_rate, const std::string& path);

}  // namespace gridgp
