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

#include "gridgp/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <sstream>

#include "gridgp/errors.hpp"

namespace gridgp {

namespace {

using cplx = std::complex<double>;

struct ModeRoots {
  cplx plus, minus;  // characteristic roots s = -gamma/2 +- sqrt(gamma^2/4 - lambda)
};

ModeRoots roots_of(double gamma, double lambda) {
  const double a = 0.5 * gamma;
  cplx disc = std::sqrt(cplx(a * a - lambda, 0.0));
  // Critically damped modes have a repeated root; nudge the discriminant so
  // the two-root partial fractions stay finite. The induced error is O(eps^2).
  const double eps = 1e-7 * std::max(1.0, a);
  if (std::abs(disc) < eps) disc = cplx(eps, 0.0);
  return {cplx(-a, 0.0) + disc, cplx(-a, 0.0) - disc};
}

// Rigid-body eigenvalues come out of the solver as tiny negatives; clamp
// within the model's PSD slack, reject anything truly negative.
double clamp_lambda(double lambda) {
  if (lambda >= 0.0) return lambda;
  if (lambda > -1e-8 * std::max(1.0, std::abs(lambda))) return 0.0;
  throw NumericError("kernel: lambda must be nonnegative, got " + format_double(lambda));
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0)) throw NumericError("kernel: gamma must be positive");
}

}  // namespace

double impulse_velocity_response(double gamma, double lambda, double t) {
  if (t < 0.0) return 0.0;
  const ModeRoots r = roots_of(gamma, clamp_lambda(lambda));
  const cplx denom = r.plus - r.minus;
  return ((r.plus * std::exp(r.plus * t) - r.minus * std::exp(r.minus * t)) / denom).real();
}

double kernel_value(double gamma, double lambda_i, double lambda_j, double tau) {
  check_gamma(gamma);
  lambda_i = clamp_lambda(lambda_i);
  lambda_j = clamp_lambda(lambda_j);
  if (tau < 0.0) return kernel_value(gamma, lambda_j, lambda_i, -tau);

  // With hdot(t) = sum_a c_a s_a exp(s_a t), c_+- = +-1/(s_+ - s_-), the
  // defining integral reduces to a four-term sum over root pairs:
  //   integral_0^inf exp((s_a + s_b) s) ds = -1/(s_a + s_b),  Re(s_a+s_b) < 0.
  const ModeRoots ri = roots_of(gamma, lambda_i);
  const ModeRoots rj = roots_of(gamma, lambda_j);
  const cplx ci = 1.0 / (ri.plus - ri.minus);
  const cplx cj = 1.0 / (rj.plus - rj.minus);

  const cplx si[2] = {ri.plus, ri.minus};
  const cplx sj[2] = {rj.plus, rj.minus};
  const cplx wi[2] = {ci, -ci};
  const cplx wj[2] = {cj, -cj};

  cplx sum(0.0, 0.0);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const cplx pair_sum = si[a] + sj[b];
      if (std::abs(pair_sum) < 1e-300) continue;  // both roots ~0: term vanishes with s_a*s_b
      sum += wi[a] * wj[b] * si[a] * sj[b] * std::exp(si[a] * tau) * (-1.0 / pair_sum);
    }
  }
  return sum.real();
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth,
                        bool& converged) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) {
    converged = false;
    return left + right;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, converged) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, converged);
}

}  // namespace

double kernel_value_quadrature(double gamma, double lambda_i, double lambda_j, double tau,
                               double rel_tol) {
  check_gamma(gamma);
  lambda_i = clamp_lambda(lambda_i);
  lambda_j = clamp_lambda(lambda_j);
  if (tau < 0.0) return kernel_value_quadrature(gamma, lambda_j, lambda_i, -tau, rel_tol);

  const auto integrand = [&](double s) {
    return impulse_velocity_response(gamma, lambda_i, tau + s) *
           impulse_velocity_response(gamma, lambda_j, s);
  };
  const double s_max = 50.0 / gamma;  // envelope decays like exp(-gamma s)
  // Scale the absolute tolerance to the zero-lag variance 1/(2 gamma).
  const double tol = rel_tol * 0.5 / gamma;

  bool converged = true;
  const double fa = integrand(0.0), fb = integrand(s_max), fm = integrand(0.5 * s_max);
  const double whole = s_max / 6.0 * (fa + 4.0 * fm + fb);
  const double value = adaptive_simpson(integrand, 0.0, s_max, fa, fm, fb, whole, tol, 48, converged);
  if (!converged) {
    std::ostringstream msg;
    msg << "kernel quadrature did not converge for mode pair (lambda_i=" << lambda_i
        << ", lambda_j=" << lambda_j << ", tau=" << tau << ")";
    throw NumericError(msg.str());
  }
  return value;
}

Matrix kernel_matrix(const EigenBasis& basis, double tau) {
  const int r = basis.r();
  if (r == 0) throw ConfigError("kernel_matrix: retained mode set is empty");
  Matrix k(r, r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      k(i, j) = kernel_value(basis.gamma, basis.lambda[basis.retained_modes[i]],
                             basis.lambda[basis.retained_modes[j]], tau);
    }
  }
  return k;
}

Matrix kernel_matrix_quadrature(const EigenBasis& basis, double tau, double rel_tol) {
  const int r = basis.r();
  if (r == 0) throw ConfigError("kernel_matrix: retained mode set is empty");
  Matrix k(r, r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      k(i, j) = kernel_value_quadrature(basis.gamma, basis.lambda[basis.retained_modes[i]],
                                        basis.lambda[basis.retained_modes[j]], tau, rel_tol);
    }
  }
  return k;
}

bool KernelTensor::has(double tau) const {
  for (double lag : lags) {
    if (std::abs(lag - tau) <= 1e-9 * std::max(1.0, std::abs(tau))) return true;
  }
  return false;
}

const Matrix& KernelTensor::at(double tau) const {
  for (size_t k = 0; k < lags.size(); ++k) {
    if (std::abs(lags[k] - tau) <= 1e-9 * std::max(1.0, std::abs(tau))) return entries[k];
  }
  std::ostringstream msg;
  msg << "kernel tensor has no entry for lag " << tau << " s; available lags:";
  for (double lag : lags) msg << " " << lag;
  throw ConfigError(msg.str());
}

KernelTensor build_kernel_tensor(const EigenBasis& basis, const std::vector<double>& lags) {
  KernelTensor tensor;
  tensor.gamma = basis.gamma;
  tensor.lambda.resize(basis.r());
  for (int i = 0; i < basis.r(); ++i) tensor.lambda[i] = basis.lambda[basis.retained_modes[i]];
  for (double lag : lags) {
    if (lag < 0.0) throw ConfigError("kernel tensor lags must be nonnegative");
  }
  tensor.lags = lags;
  tensor.entries.resize(lags.size());
  parallel_for(static_cast<int>(lags.size()),
               [&](int k) { tensor.entries[k] = kernel_matrix(basis, lags[k]); });
  return tensor;
}

}  // namespace gridgp
