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

#include <vector>

#include "gridgp/grid_model.hpp"

namespace gridgp {

// Stationary velocity cross-covariance of two unit-white-noise-driven modes
// sharing one input:
//
//   K_tau[i,j] = integral_0^inf hdot_i(tau + s) hdot_j(s) ds,   tau >= 0
//
// where h_i is the unit impulse response of y'' + gamma y' + lambda_i y = x.
// Negative lags follow from stationarity, K_{-tau} = K_tau^T. Evaluated in
// closed form from the characteristic roots; underdamped, overdamped and
// rigid-body (lambda = 0) modes share one complex-arithmetic path.
double kernel_value(double gamma, double lambda_i, double lambda_j, double tau);

// Same integral by adaptive Simpson quadrature; the slow cross-check route.
double kernel_value_quadrature(double gamma, double lambda_i, double lambda_j, double tau,
                               double rel_tol = 1e-8);

// Unit impulse velocity response hdot(t) of y'' + gamma y' + lambda y = x.
double impulse_velocity_response(double gamma, double lambda, double t);

// r x r kernel over the retained modes of the basis.
Matrix kernel_matrix(const EigenBasis& basis, double tau);
Matrix kernel_matrix_quadrature(const EigenBasis& basis, double tau, double rel_tol = 1e-8);

/// Kernel matrices pre-evaluated at a fixed lag set.
struct KernelTensor {
  std::vector<double> lags;      // seconds, as configured (>= 0)
  std::vector<Matrix> entries;   // r x r per lag
  Vector lambda;                 // retained-mode eigenvalues
  double gamma{0.0};

  // Entry for the given lag; throws ConfigError listing available lags.
  const Matrix& at(double tau) const;
  bool has(double tau) const;
};

KernelTensor build_kernel_tensor(const EigenBasis& basis, const std::vector<double>& lags);

}  // namespace gridgp
