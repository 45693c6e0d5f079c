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

#include "simplex.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace gridgp::oracles {

namespace {

constexpr double kEps = 1e-10;

// One simplex phase on the tableau [A | b] with reduced costs maintained
// in-place. Dantzig pivoting, falling back to Bland's rule when the
// objective stalls (anti-cycling).
bool run_phase(Matrix& tableau, std::vector<int>& basis, int max_iterations) {
  const int rows = static_cast<int>(tableau.rows()) - 1;
  const int cols = static_cast<int>(tableau.cols()) - 1;
  int stalled = 0;
  double last_objective = tableau(rows, cols);
  for (int it = 0; it < max_iterations; ++it) {
    const bool bland = stalled > 64;
    int pivot_col = -1;
    double most_negative = -kEps;
    for (int j = 0; j < cols; ++j) {
      if (tableau(rows, j) < most_negative) {
        pivot_col = j;
        if (bland) break;
        most_negative = tableau(rows, j);
      }
    }
    if (pivot_col < 0) return true;  // optimal

    int pivot_row = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < rows; ++i) {
      const double aij = tableau(i, pivot_col);
      if (aij > kEps) {
        const double ratio = tableau(i, cols) / aij;
        if (pivot_row < 0 || ratio < best_ratio - kEps ||
            (std::abs(ratio - best_ratio) <= kEps && basis[i] < basis[pivot_row])) {
          pivot_row = i;
          best_ratio = ratio;
        }
      }
    }
    if (pivot_row < 0) return false;  // unbounded

    tableau.row(pivot_row) /= tableau(pivot_row, pivot_col);
    for (int i = 0; i <= rows; ++i) {
      if (i == pivot_row) continue;
      const double factor = tableau(i, pivot_col);
      if (factor != 0.0) tableau.row(i) -= factor * tableau.row(pivot_row);
    }
    basis[pivot_row] = pivot_col;
    const double objective = tableau(rows, cols);
    stalled = objective < last_objective - kEps ? 0 : stalled + 1;
    last_objective = objective;
  }
  throw std::runtime_error("simplex: iteration cap reached");
}

}  // namespace

LpResult simplex_solve(const Vector& c, const Matrix& a, const Vector& b, int max_iterations) {
  const int rows = static_cast<int>(a.rows());
  const int cols = static_cast<int>(a.cols());

  // Phase 1 with one artificial per row; rows flipped so b >= 0.
  Matrix tableau = Matrix::Zero(rows + 1, cols + rows + 1);
  for (int i = 0; i < rows; ++i) {
    const double sign = b[i] >= 0.0 ? 1.0 : -1.0;
    tableau.block(i, 0, 1, cols) = sign * a.row(i);
    tableau(i, cols + i) = 1.0;
    tableau(i, cols + rows) = sign * b[i];
  }
  std::vector<int> basis(rows);
  for (int i = 0; i < rows; ++i) basis[i] = cols + i;
  // phase-1 cost: sum of artificials, expressed via reduced costs
  for (int j = 0; j < cols + rows; ++j) {
    double sum = 0.0;
    for (int i = 0; i < rows; ++i) sum += tableau(i, j);
    tableau(rows, j) = (j >= cols ? 1.0 : 0.0) - sum;
  }
  double rhs_sum = 0.0;
  for (int i = 0; i < rows; ++i) rhs_sum += tableau(i, cols + rows);
  tableau(rows, cols + rows) = -rhs_sum;

  LpResult result;
  if (!run_phase(tableau, basis, max_iterations)) return result;
  if (tableau(rows, cols + rows) < -1e-6 * std::max(1.0, std::abs(rhs_sum))) return result;  // infeasible

  // Drive any artificial still in the basis out (or confirm its row is zero).
  for (int i = 0; i < rows; ++i) {
    if (basis[i] < cols) continue;
    int replacement = -1;
    for (int j = 0; j < cols; ++j) {
      if (std::abs(tableau(i, j)) > 1e-9) {
        replacement = j;
        break;
      }
    }
    if (replacement < 0) continue;  // redundant row
    tableau.row(i) /= tableau(i, replacement);
    for (int k = 0; k <= rows; ++k) {
      if (k == i) continue;
      const double factor = tableau(k, replacement);
      if (factor != 0.0) tableau.row(k) -= factor * tableau.row(i);
    }
    basis[i] = replacement;
  }

  // Phase 2 on the original columns.
  Matrix phase2 = Matrix::Zero(rows + 1, cols + 1);
  phase2.block(0, 0, rows, cols) = tableau.block(0, 0, rows, cols);
  phase2.block(0, cols, rows, 1) = tableau.block(0, cols + rows, rows, 1);
  for (int j = 0; j < cols; ++j) phase2(rows, j) = c[j];
  for (int i = 0; i < rows; ++i) {
    if (basis[i] < cols) {
      const double factor = phase2(rows, basis[i]);
      if (factor != 0.0) phase2.row(rows) -= factor * phase2.row(i);
    }
  }
  if (!run_phase(phase2, basis, max_iterations)) {
    throw std::runtime_error("simplex: phase-2 unbounded");
  }

  result.optimal = true;
  result.x = Vector::Zero(cols);
  for (int i = 0; i < rows; ++i) {
    if (basis[i] < cols) result.x[basis[i]] = phase2(i, cols);
  }
  result.objective = c.dot(result.x);
  return result;
}

double l1_regression_optimum(const Matrix& design, const Vector& rhs, Vector* minimizer) {
  const int n = static_cast<int>(design.rows());
  const int u = static_cast<int>(design.cols());
  // variables: a+ (u), a- (u), t (n), s1 (n), s2 (n)
  const int cols = 2 * u + 3 * n;
  Matrix a = Matrix::Zero(2 * n, cols);
  Vector b(2 * n);
  for (int k = 0; k < n; ++k) {
    a.block(k, 0, 1, u) = design.row(k);
    a.block(k, u, 1, u) = -design.row(k);
    a(k, 2 * u + k) = -1.0;
    a(k, 2 * u + n + k) = 1.0;
    b[k] = rhs[k];

    a.block(n + k, 0, 1, u) = -design.row(k);
    a.block(n + k, u, 1, u) = design.row(k);
    a(n + k, 2 * u + k) = -1.0;
    a(n + k, 2 * u + 2 * n + k) = 1.0;
    b[n + k] = -rhs[k];
  }
  Vector c = Vector::Zero(cols);
  for (int k = 0; k < n; ++k) c[2 * u + k] = 1.0;

  const LpResult lp = simplex_solve(c, a, b);
  if (!lp.optimal) throw std::runtime_error("epigraph LP did not solve");
  if (minimizer) {
    minimizer->resize(u);
    for (int j = 0; j < u; ++j) (*minimizer)[j] = lp.x[j] - lp.x[u + j];
  }
  return lp.objective;
}

}  // namespace gridgp::oracles
