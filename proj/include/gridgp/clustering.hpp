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
#include <vector>

#include "gridgp/inference.hpp"

namespace gridgp {

/// k-medoids grouping of generators by learned correlation. The distance is
/// d(i,j) = 1 - |rho_ij| with rho taken from Sigma_0(A) over all n
/// generators, so strongly anti-correlated machines also group together.
struct ClusterAssignment {
  int k{0};
  std::vector<int> medoids;     // generator indices, one per cluster
  std::vector<int> membership;  // cluster index per generator
  Matrix distances;             // n x n
  double cost{0.0};

  std::vector<int> members_of(int cluster) const;
};

// Correlation distance matrix from the learned covariance; normalization
// uses the model-implied standard deviations (sqrt of the Sigma_0 diagonal),
// since sample moments exist only at metered locations.
Matrix correlation_distances(const LearnedCovariance& learned);

// PAM (build + swap until no improving swap, capped at 200 swap rounds) on a
// precomputed distance matrix. Deterministic scan order; ties pick the
// lowest index.
ClusterAssignment pam_cluster(const Matrix& distances, int k);

// The seed is accepted for interface stability and reproducibility contracts;
// PAM build+swap is deterministic and does not consume it.
ClusterAssignment cluster_generators(const LearnedCovariance& learned, int k, std::uint64_t seed);

// Default cluster count, one cluster per ~10 generators.
int default_cluster_count(int n);

// Dimension-reduced inference: each target is conditioned only on surviving
// meters within its own cluster. With k = 1 this is exactly the full path.
Prediction infer_dimension_reduced(const LearnedCovariance& learned, const TimeSeriesRecord& record,
                                   const MeterWeights* weights, const std::vector<int>& targets,
                                   const ClusterAssignment& assignment,
                                   const PredictOptions& options);

// Aggregate representation: per cluster, predicts the inertia-weighted
// equivalent speed of its non-metered members, conditioned on same-cluster
// surviving meters. Clusters without targets are skipped.
Prediction infer_aggregate(const LearnedCovariance& learned, const TimeSeriesRecord& record,
                           const MeterWeights* weights, const std::vector<int>& targets,
                           const ClusterAssignment& assignment, const PredictOptions& options);

nlohmann::json assignment_to_json(const ClusterAssignment& assignment, const GridModel& model);

}  // namespace gridgp
