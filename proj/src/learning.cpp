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

#include "gridgp/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "gridgp/errors.hpp"

namespace gridgp {

int packed_size(int modes) { return modes * (modes + 1) / 2; }

namespace {

// Packed index of the (i, j) upper-triangle entry, i <= j.
inline int packed_index(int i, int j, int r) { return i * r - i * (i - 1) / 2 + (j - i); }

Vector finish_stds(const Moments& moments, std::vector<std::string>& warnings) {
  bool has_zero_lag = false;
  for (int t : moments.lag_ticks) has_zero_lag |= (t == 0);
  if (!has_zero_lag) {
    warnings.push_back(
        "lag 0 is not in the configured lag set (recommended); correlation "
        "normalization disabled, fitting raw covariance entries");
    return Vector::Ones(moments.width());
  }
  return sample_stds(moments);
}

}  // namespace

Matrix unpack_symmetric(const Vector& packed, int modes) {
  Matrix a(modes, modes);
  for (int i = 0; i < modes; ++i) {
    for (int j = i; j < modes; ++j) {
      a(i, j) = packed[packed_index(i, j, modes)];
      a(j, i) = a(i, j);
    }
  }
  return a;
}

Vector pack_symmetric(const Matrix& a) {
  const int r = static_cast<int>(a.rows());
  Vector packed(packed_size(r));
  for (int i = 0; i < r; ++i) {
    for (int j = i; j < r; ++j) packed[packed_index(i, j, r)] = a(i, j);
  }
  return packed;
}

FitProblem build_fit_problem(const Moments& moments, const KernelTensor& kernel,
                             const EigenBasis& basis, const GridModel& model, const Vector& stds) {
  if (kernel.lags.size() != moments.lags.size()) {
    throw ConfigError("fit: kernel and moments must share the lag set");
  }
  for (size_t k = 0; k < kernel.lags.size(); ++k) {
    if (std::abs(kernel.lags[k] - moments.lags[k]) > 1e-9 * std::max(1.0, kernel.lags[k])) {
      throw ConfigError("fit: kernel and moments must share the lag set");
    }
  }
  const int r = basis.r();
  const int m = moments.width();
  const int u = packed_size(r);
  const Matrix gain = mode_gain(model, basis, moments.columns);
  const Vector inv_std = stds.cwiseInverse();

  FitProblem problem;
  problem.modes = r;
  problem.meters = m;
  problem.lags = moments.lags;
  problem.design.resize(static_cast<int>(moments.lags.size()) * m * m, u);
  problem.rhs.resize(problem.design.rows());

  for (size_t lag = 0; lag < moments.lags.size(); ++lag) {
    const Matrix& k = kernel.entries[lag];
    const Matrix c = inv_std.asDiagonal() * moments.C[lag] * inv_std.asDiagonal();
    const int base = static_cast<int>(lag) * m * m;
    parallel_for(m, [&](int p) {
      for (int q = 0; q < m; ++q) {
        const int row = base + p * m + q;
        const double scale = inv_std[p] * inv_std[q];
        problem.rhs[row] = c(p, q);
        for (int i = 0; i < r; ++i) {
          problem.design(row, packed_index(i, i, r)) = scale * gain(p, i) * gain(q, i) * k(i, i);
          for (int j = i + 1; j < r; ++j) {
            problem.design(row, packed_index(i, j, r)) =
                scale * (gain(p, i) * gain(q, j) * k(i, j) + gain(p, j) * gain(q, i) * k(j, i));
          }
        }
      }
    });
  }
  return problem;
}

double l1_objective(const FitProblem& problem, const Vector& a) {
  return (problem.design * a - problem.rhs).cwiseAbs().sum();
}

namespace {

LearnedCovariance make_learned(const Moments& moments, const KernelTensor& kernel,
                               const EigenBasis& basis, const GridModel& model, const Vector& stds,
                               const Matrix& a) {
  LearnedCovariance learned;
  learned.A = a;
  learned.kernel = kernel;
  learned.basis = basis;
  learned.model = model;
  learned.normalization = stds;
  learned.meter_columns = moments.columns;
  return learned;
}

void fill_residuals(const FitProblem& problem, const Vector& a, FitReport& report) {
  const Vector res = problem.design * a - problem.rhs;
  const int m = problem.meters;
  report.residuals.clear();
  for (size_t lag = 0; lag < problem.lags.size(); ++lag) {
    Matrix r(m, m);
    const int base = static_cast<int>(lag) * m * m;
    for (int p = 0; p < m; ++p) {
      for (int q = 0; q < m; ++q) r(p, q) = res[base + p * m + q];
    }
    report.residuals.push_back(std::move(r));
  }
  report.lags = problem.lags;
}

// Rank and null-direction diagnostics for deficient designs.
void describe_rank(const FitProblem& problem, int rank, FitReport& report) {
  report.design_rank = rank;
  report.unknowns = static_cast<int>(problem.design.cols());
  if (rank >= report.unknowns) return;
  Eigen::BDCSVD<Matrix> svd(problem.design, Eigen::ComputeThinV);
  const double thresh = svd.singularValues()[0] *
                        std::max(problem.design.rows(), problem.design.cols()) *
                        Eigen::NumTraits<double>::epsilon();
  const int r = problem.modes;
  (void)thresh;
  std::ostringstream msg;
  msg << "design is rank deficient (" << rank << "/" << report.unknowns
      << "); unidentifiable directions pinned to zero (minimum norm); null directions:";
  int listed = 0;
  for (int k = static_cast<int>(svd.singularValues().size()) - 1; k >= rank && listed < 5;
       --k, ++listed) {
    const Vector dir = svd.matrixV().col(k);
    int best = 0;
    for (int idx = 1; idx < dir.size(); ++idx) {
      if (std::abs(dir[idx]) > std::abs(dir[best])) best = idx;
    }
    for (int i = 0; i < r; ++i) {
      for (int j = i; j < r; ++j) {
        if (packed_index(i, j, r) == best) msg << " A(" << i << "," << j << ")";
      }
    }
  }
  report.warnings.push_back(msg.str());
}

// Exact minimization of sum_k |res_k + t * g_k| over t via weighted median.
// Updates res/objective and reports the step when strictly improving.
bool weighted_median_step(const Vector& g, Vector& res, double& objective, double& step_out) {
  struct Point {
    double b, w;
  };
  static thread_local std::vector<Point> pts;
  pts.clear();
  double total = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    const double w = std::abs(g[k]);
    if (w < 1e-300) continue;
    pts.push_back({-res[k] / g[k], w});
    total += w;
  }
  if (pts.empty()) return false;
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.b < b.b; });
  double acc = 0.0;
  double t = pts.back().b;
  for (const auto& p : pts) {
    acc += p.w;
    if (acc >= 0.5 * total) {
      t = p.b;
      break;
    }
  }
  if (t == 0.0) return false;
  double candidate = 0.0;
  for (int k = 0; k < g.size(); ++k) candidate += std::abs(res[k] + t * g[k]);
  if (candidate >= objective - 1e-15 * std::max(1.0, objective)) return false;
  res += t * g;
  objective = candidate;
  step_out = t;
  return true;
}

}  // namespace

namespace {

// Numerical-rank reduction of the design. Columns of `span` are the
// identifiable right-singular directions; everything below the threshold is
// pinned to zero (minimum norm).
struct ReducedDesign {
  Matrix span;     // u x rank
  Matrix reduced;  // rows x rank, design * span
  int rank{0};
};

ReducedDesign reduce_design(const FitProblem& problem, const FitConfig& config,
                            FitReport& report) {
  Eigen::BDCSVD<Matrix> svd(problem.design, Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double floor = std::max(config.rank_threshold * sv[0],
                                sv[0] * problem.design.rows() * Eigen::NumTraits<double>::epsilon());
  ReducedDesign out;
  out.rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] >= floor) out.rank = i + 1;
  }
  if (out.rank < 1) throw NumericError("fit: design matrix is numerically zero");
  out.span = svd.matrixV().leftCols(out.rank);
  out.reduced = problem.design * out.span;
  describe_rank(problem, out.rank, report);
  return out;
}

}  // namespace

Vector solve_l2_problem(const FitProblem& problem, const FitConfig& config, FitReport& report) {
  const ReducedDesign reduced = reduce_design(problem, config, report);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(reduced.reduced);
  const Vector a = reduced.span * cod.solve(problem.rhs).eval();

  const Vector res = problem.design * a - problem.rhs;
  report.objective = res.squaredNorm();
  report.objective_trajectory.push_back(report.objective);
  report.iterations += 1;
  const double grad_norm = (reduced.reduced.transpose() * res).cwiseAbs().maxCoeff();
  if (grad_norm > std::max(config.tolerance, 1e-8) * std::max(1.0, report.objective)) {
    report.warnings.push_back("least-squares gradient norm " + format_double(grad_norm) +
                              " above tolerance");
  }
  return a;
}

Vector solve_l1_problem(const FitProblem& problem, const FitConfig& config, FitReport& report) {
  const ReducedDesign reduced = reduce_design(problem, config, report);
  const Matrix& phi = reduced.reduced;  // optimize in the identifiable subspace
  const int u = reduced.rank;
  const int rows = static_cast<int>(phi.rows());

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(phi);
  Vector a = cod.solve(problem.rhs);

  Vector res = phi * a - problem.rhs;
  double objective = res.cwiseAbs().sum();
  report.objective_trajectory.push_back(objective);

  // IRLS on the smoothed objective sum_k sqrt(res_k^2 + eps^2) with an eps
  // ladder 1e-2 -> 1e-8, reusing the weighted normal equations throughout.
  int iterations = 0;
  double last_decrease = 0.0;
  bool converged = true;
  Matrix weighted(rows, u);
  for (double eps = 1e-2; eps >= 0.99e-8; eps *= 0.1) {
    double smoothed = (res.array().square() + eps * eps).sqrt().sum();
    for (int it = 0; it < config.max_iterations; ++it) {
      ++iterations;
      const Vector w = (res.array().square() + eps * eps).rsqrt();
      weighted = w.asDiagonal() * phi;
      Matrix normal = phi.transpose() * weighted;
      normal.diagonal().array() += 1e-12 * normal.trace() / u + 1e-300;
      const Vector target = weighted.transpose() * problem.rhs;
      const Vector next = Eigen::LDLT<Matrix>(normal).solve(target);
      res = phi * next - problem.rhs;
      a = next;
      const double now = (res.array().square() + eps * eps).sqrt().sum();
      last_decrease = (smoothed - now) / std::max(1.0, smoothed);
      smoothed = now;
      if (std::abs(last_decrease) < std::max(config.tolerance, 1e-14)) break;
      if (it + 1 == config.max_iterations && eps < 1.5e-8) converged = false;
    }
    objective = res.cwiseAbs().sum();
    report.objective_trajectory.push_back(objective);
  }
  if (!converged && last_decrease > 100.0 * config.tolerance) {
    throw NumericError("fit_l1 did not converge within max_iterations; final objective " +
                       format_double(objective) + ", last relative decrease (gap estimate) " +
                       format_double(last_decrease));
  }

  // Exact polish on the piecewise-linear objective, in the reduced space.
  if (rows >= u) {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    bool improved = true;
    int sweeps = 0;
    while (improved && sweeps < 100) {
      improved = false;
      ++sweeps;
      for (int j = 0; j < u; ++j) {
        double step = 0.0;
        if (weighted_median_step(phi.col(j), res, objective, step)) {
          a[j] += step;
          improved = true;
        }
      }
      for (int extra = 0; extra < 4; ++extra) {
        Vector dir(u);
        for (int j = 0; j < u; ++j) dir[j] = gauss(rng);
        dir /= dir.norm();
        const Vector g = phi * dir;
        double step = 0.0;
        if (weighted_median_step(g, res, objective, step)) {
          a += step * dir;
          improved = true;
        }
      }
      // Active-set snap: a generic L1 optimum zeroes u residuals; solving for
      // that vertex directly often lands exactly on it.
      std::vector<int> order(rows);
      std::iota(order.begin(), order.end(), 0);
      std::partial_sort(order.begin(), order.begin() + u, order.end(),
                        [&](int x, int y) { return std::abs(res[x]) < std::abs(res[y]); });
      Matrix phi_z(u, u);
      Vector rhs_z(u);
      for (int k = 0; k < u; ++k) {
        phi_z.row(k) = phi.row(order[k]);
        rhs_z[k] = problem.rhs[order[k]];
      }
      Eigen::FullPivLU<Matrix> lu(phi_z);
      if (lu.isInvertible()) {
        const Vector cand = lu.solve(rhs_z);
        const Vector cand_res = phi * cand - problem.rhs;
        const double cand_obj = cand_res.cwiseAbs().sum();
        if (cand_obj < objective - 1e-15 * std::max(1.0, objective)) {
          a = cand;
          res = cand_res;
          objective = cand_obj;
          improved = true;
        }
      }
      report.objective_trajectory.push_back(objective);
    }
    if (sweeps >= 100) report.warnings.push_back("L1 polish stopped at the sweep cap");
  }

  report.objective = objective;
  report.iterations += iterations;
  return reduced.span * a;
}

namespace {

// Post-fit PSD check: the fit does not project A, it only reports.
void warn_if_indefinite(const Matrix& a, FitReport& report) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double spectral = es.eigenvalues().cwiseAbs().maxCoeff();
  if (lo < -1e-6 * spectral) {
    report.warnings.push_back("fitted A is indefinite: min eigenvalue " + format_double(lo) +
                              " vs spectral norm " + format_double(spectral));
  }
}

}  // namespace

FitResult fit_l2(const Moments& moments, const KernelTensor& kernel, const EigenBasis& basis,
                 const GridModel& model, const FitConfig& config) {
  FitReport report;
  const Vector stds = finish_stds(moments, report.warnings);
  const FitProblem problem = build_fit_problem(moments, kernel, basis, model, stds);
  const Vector a = solve_l2_problem(problem, config, report);
  fill_residuals(problem, a, report);
  warn_if_indefinite(unpack_symmetric(a, problem.modes), report);
  FitResult out{make_learned(moments, kernel, basis, model, stds, unpack_symmetric(a, problem.modes)),
                std::move(report)};
  for (const auto& w : moments.warnings) out.report.warnings.push_back(w);
  return out;
}

FitResult fit_l1(const Moments& moments, const KernelTensor& kernel, const EigenBasis& basis,
                 const GridModel& model, const FitConfig& config) {
  FitReport report;
  const Vector stds = finish_stds(moments, report.warnings);
  const FitProblem problem = build_fit_problem(moments, kernel, basis, model, stds);
  const Vector a = solve_l1_problem(problem, config, report);
  fill_residuals(problem, a, report);
  warn_if_indefinite(unpack_symmetric(a, problem.modes), report);
  FitResult out{make_learned(moments, kernel, basis, model, stds, unpack_symmetric(a, problem.modes)),
                std::move(report)};
  for (const auto& w : moments.warnings) out.report.warnings.push_back(w);
  return out;
}

nlohmann::json fit_report_to_json(const FitReport& report) {
  nlohmann::json doc;
  doc["objective"] = report.objective;
  doc["objective_trajectory"] = report.objective_trajectory;
  doc["iterations"] = report.iterations;
  doc["design_rank"] = report.design_rank;
  doc["unknowns"] = report.unknowns;
  doc["warnings"] = report.warnings;
  doc["lags"] = report.lags;
  return doc;
}

}  // namespace gridgp
