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

#include "oracles.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace gridgp::oracles {

MonteCarloResult mc_velocity_cross_covariance(double gamma, double lambda_i, double lambda_j,
                                              double tau, long steps, std::uint64_t seed) {
  const bool same = lambda_i == lambda_j;
  const int dim = same ? 2 : 4;

  Matrix drift = Matrix::Zero(dim, dim);
  drift(0, 1) = 1.0;
  drift(1, 0) = -lambda_i;
  drift(1, 1) = -gamma;
  Vector input = Vector::Zero(dim);
  input[1] = 1.0;
  if (!same) {
    drift(2, 3) = 1.0;
    drift(3, 2) = -lambda_j;
    drift(3, 3) = -gamma;
    input[3] = 1.0;
  }

  // Pick the step so tau is an exact multiple and dynamics are resolved.
  double h = 0.04 / std::max(1.0, std::sqrt(std::max(lambda_i, lambda_j)));
  long lag_steps = 0;
  if (tau > 0.0) {
    lag_steps = std::max<long>(1, std::llround(tau / h));
    h = tau / static_cast<double>(lag_steps);
  }

  // Exact one-step transition and noise covariance (Van Loan).
  Matrix big = Matrix::Zero(2 * dim, 2 * dim);
  big.topLeftCorner(dim, dim) = -drift;
  big.topRightCorner(dim, dim) = input * input.transpose();
  big.bottomRightCorner(dim, dim) = drift.transpose();
  const Matrix exp_big = (big * h).exp();
  const Matrix transition = exp_big.bottomRightCorner(dim, dim).transpose();
  Matrix step_cov = transition * exp_big.topRightCorner(dim, dim);
  step_cov = 0.5 * (step_cov + step_cov.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(step_cov);
  const Matrix noise_shape =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector state = Vector::Zero(dim);
  Vector xi(dim);

  const long burn = std::llround(8.0 / (gamma * h));
  for (long s = 0; s < burn; ++s) {
    for (int k = 0; k < dim; ++k) xi[k] = gauss(rng);
    state = transition * state + noise_shape * xi;
  }

  const int vi = 1;
  const int vj = same ? 1 : 3;
  std::vector<double> ring(static_cast<size_t>(lag_steps) + 1, 0.0);
  long head = 0;
  // lead-lag product: v_i at time t+tau, v_j at time t
  double sum = 0.0;
  long count = 0;
  const int batches = 64;
  std::vector<double> batch_sum(batches, 0.0);
  std::vector<long> batch_count(batches, 0);
  for (long s = 0; s < steps; ++s) {
    for (int k = 0; k < dim; ++k) xi[k] = gauss(rng);
    state = transition * state + noise_shape * xi;
    ring[head] = state[vj];
    head = (head + 1) % static_cast<long>(ring.size());
    if (s >= lag_steps) {
      const double lagged_vj = ring[head];  // v_j from lag_steps ago
      const double prod = state[vi] * lagged_vj;
      sum += prod;
      const int b = static_cast<int>((count * batches) / steps);
      batch_sum[std::min(b, batches - 1)] += prod;
      batch_count[std::min(b, batches - 1)] += 1;
      ++count;
    }
  }
  const double mean = sum / count;
  double var = 0.0;
  int used = 0;
  for (int b = 0; b < batches; ++b) {
    if (batch_count[b] < 10) continue;
    const double bm = batch_sum[b] / batch_count[b];
    var += (bm - mean) * (bm - mean);
    ++used;
  }
  MonteCarloResult out;
  out.value = mean;
  out.std_error = used > 1 ? std::sqrt(var / (used * (used - 1))) : 0.0;
  return out;
}

Matrix dense_schur_complement(const Matrix& full, const std::vector<int>& keep) {
  const int nb = static_cast<int>(full.rows());
  std::vector<char> keep_mask(nb, 0);
  for (int k : keep) keep_mask[k] = 1;
  std::vector<int> drop;
  for (int b = 0; b < nb; ++b) {
    if (!keep_mask[b]) drop.push_back(b);
  }
  const int ng = static_cast<int>(keep.size());
  const int ni = static_cast<int>(drop.size());
  Matrix a(ng, ng), bmat(ng, ni), d(ni, ni);
  for (int i = 0; i < ng; ++i) {
    for (int j = 0; j < ng; ++j) a(i, j) = full(keep[i], keep[j]);
    for (int j = 0; j < ni; ++j) bmat(i, j) = full(keep[i], drop[j]);
  }
  for (int i = 0; i < ni; ++i) {
    for (int j = 0; j < ni; ++j) d(i, j) = full(drop[i], drop[j]);
  }
  if (ni == 0) return a;
  return a - bmat * d.colPivHouseholderQr().solve(bmat.transpose());
}

double masked_binary_objective(const Matrix& b, const std::vector<bool>& w, double beta) {
  const int m = static_cast<int>(b.rows());
  double objective = 0.0;
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      if (!w[p] && !w[q]) objective += b(p, q);
    }
  }
  for (int p = 0; p < m; ++p) objective += w[p] ? beta : 0.0;
  return objective;
}

std::vector<bool> exhaustive_mask_search(const Matrix& b, double beta) {
  const int m = static_cast<int>(b.rows());
  if (m > 20) throw std::runtime_error("exhaustive mask search limited to m <= 20");
  std::vector<bool> best(m, false);
  double best_objective = masked_binary_objective(b, best, beta);
  for (unsigned long bits = 1; bits < (1UL << m); ++bits) {
    std::vector<bool> w(m);
    for (int p = 0; p < m; ++p) w[p] = (bits >> p) & 1;
    const double objective = masked_binary_objective(b, w, beta);
    if (objective < best_objective) {
      best_objective = objective;
      best = w;
    }
  }
  return best;
}

}  // namespace gridgp::oracles
