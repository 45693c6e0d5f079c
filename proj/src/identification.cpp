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

#include "gridgp/identification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <nlohmann/json.hpp>

#include "gridgp/errors.hpp"

namespace gridgp {

std::vector<int> MeterWeights::flagged() const {
  std::vector<int> out;
  for (size_t i = 0; i < binarized.size(); ++i) {
    if (binarized[i]) out.push_back(meters[i]);
  }
  return out;
}

std::pair<Matrix, Matrix> build_mask(const Vector& w) {
  const int m = static_cast<int>(w.size());
  for (int i = 0; i < m; ++i) {
    if (!(w[i] >= 0.0 && w[i] <= 1.0)) {
      throw ConfigError("build_mask: weight " + std::to_string(i) + " is outside [0, 1]");
    }
  }
  const Vector ones = Vector::Ones(m);
  const Vector comp = ones - w;
  Matrix big_w = w * w.transpose() + w * comp.transpose() + comp * w.transpose();
  Matrix mask = Matrix::Ones(m, m) - big_w;
  return {std::move(big_w), std::move(mask)};
}

namespace {

// Absolute residual stack B[p,q] = sum_tau |Sigma_tau(A) - C_tau|[p,q] in
// correlation units. The masked objective is then (1-w)^T B (1-w) + beta*1'w.
Matrix residual_stack(const Moments& moments, const LearnedCovariance& learned) {
  if (moments.columns != learned.meter_columns) {
    throw ConfigError("identify: moments and learned covariance cover different meter sets");
  }
  const Vector inv_std = learned.normalization.cwiseInverse();
  const int m = moments.width();
  Matrix b = Matrix::Zero(m, m);
  for (size_t k = 0; k < moments.lags.size(); ++k) {
    const Matrix sigma = sigma_of_A(learned, moments.lags[k], moments.columns);
    const Matrix sigma_n = inv_std.asDiagonal() * sigma * inv_std.asDiagonal();
    const Matrix c_n = inv_std.asDiagonal() * moments.C[k] * inv_std.asDiagonal();
    b += (sigma_n - c_n).cwiseAbs();
  }
  return 0.5 * (b + b.transpose());
}

double masked_objective(const Matrix& sym_b, const Vector& w, double beta) {
  const Vector v = Vector::Ones(w.size()) - w;
  return v.dot(sym_b * v) + beta * w.sum();
}

// One start: projected gradient with a fixed 1/L step, then exact cyclic
// coordinate minimization (the objective is a box-constrained quadratic).
Vector optimize_from(const Matrix& sym_b, double beta, Vector w, int max_iterations,
                     double tolerance) {
  const int m = static_cast<int>(w.size());
  const Vector ones = Vector::Ones(m);
  const double lipschitz = std::max(2.0 * sym_b.norm(), 1e-12);
  double obj = masked_objective(sym_b, w, beta);
  for (int it = 0; it < max_iterations; ++it) {
    const Vector grad = -2.0 * (sym_b * (ones - w)) + beta * ones;
    w = (w - grad / lipschitz).cwiseMax(0.0).cwiseMin(1.0);
    const double now = masked_objective(sym_b, w, beta);
    if (obj - now < tolerance * std::max(1.0, obj)) {
      obj = now;
      break;
    }
    obj = now;
  }
  // Coordinate pass: for v_p = 1 - w_p the objective is
  // B_pp v_p^2 + 2 s_p v_p - beta v_p + const with s_p = sum_{q != p} B_pq v_q.
  for (int pass = 0; pass < 4 * m + 8; ++pass) {
    double moved = 0.0;
    for (int p = 0; p < m; ++p) {
      const double vp = 1.0 - w[p];
      const double sp = sym_b.row(p).dot(ones - w) - sym_b(p, p) * vp;
      double v_new;
      if (sym_b(p, p) > 0.0) {
        v_new = std::clamp((0.5 * beta - sp) / sym_b(p, p), 0.0, 1.0);
      } else {
        const double slope = 2.0 * sp - beta;
        v_new = slope > 0.0 ? 0.0 : (slope < 0.0 ? 1.0 : vp);
      }
      moved = std::max(moved, std::abs(v_new - vp));
      w[p] = 1.0 - v_new;
    }
    if (moved < 1e-14) break;
  }
  return w;
}

}  // namespace

MeterWeights identify(const Moments& moments, const LearnedCovariance& learned,
                      const IdentifyConfig& config) {
  if (!(config.beta > 0.0)) throw ConfigError("identify: beta must be positive");
  Matrix sym_b = residual_stack(moments, learned);
  const int m = moments.width();

  IdentifyConfig round_config = config;
  Moments working = moments;
  LearnedCovariance current = learned;

  MeterWeights best_weights;
  for (int round = 0; round <= config.alternating_rounds; ++round) {
    if (round > 0) {
      // Optional alternating refinement: refit A with the flagged rows and
      // columns excluded, then re-identify against the refitted model.
      Vector w_bin(m);
      for (int i = 0; i < m; ++i) w_bin[i] = best_weights.binarized[i] ? 1.0 : 0.0;
      const Matrix mask = build_mask(w_bin).second;
      FitProblem problem = build_fit_problem(working, current.kernel, current.basis, current.model,
                                             current.normalization);
      std::vector<int> keep;
      for (size_t lag = 0; lag < working.lags.size(); ++lag) {
        for (int p = 0; p < m; ++p) {
          for (int q = 0; q < m; ++q) {
            if (mask(p, q) > 0.5) keep.push_back(static_cast<int>(lag) * m * m + p * m + q);
          }
        }
      }
      FitProblem masked = problem;
      masked.design.resize(static_cast<int>(keep.size()), problem.design.cols());
      masked.rhs.resize(static_cast<int>(keep.size()));
      for (size_t i = 0; i < keep.size(); ++i) {
        masked.design.row(static_cast<int>(i)) = problem.design.row(keep[i]);
        masked.rhs[static_cast<int>(i)] = problem.rhs[keep[i]];
      }
      FitConfig fit_config;
      fit_config.lags = working.lags;
      FitReport refit_report;
      const Vector a = solve_l1_problem(masked, fit_config, refit_report);
      current.A = unpack_symmetric(a, problem.modes);
      sym_b = residual_stack(working, current);
    }

    std::vector<Vector> starts;
    starts.push_back(Vector::Zero(m));
    std::mt19937_64 rng(0x517cc1b727220a95ULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < round_config.restarts; ++s) {
      Vector w(m);
      for (int i = 0; i < m; ++i) w[i] = unit(rng);
      starts.push_back(std::move(w));
    }

    std::vector<Vector> finals(starts.size());
    parallel_for(static_cast<int>(starts.size()), [&](int s) {
      finals[s] = optimize_from(sym_b, round_config.beta, starts[s], round_config.max_iterations,
                                round_config.tolerance);
    });

    int best = -1;
    double best_obj = std::numeric_limits<double>::infinity();
    for (size_t s = 0; s < finals.size(); ++s) {
      const double obj = masked_objective(sym_b, finals[s], round_config.beta);
      if (best < 0 || obj < best_obj - 1e-15 * std::max(1.0, std::abs(best_obj))) {
        best_obj = obj;
        best = static_cast<int>(s);
      }
    }
    if (best < 0 || !std::isfinite(best_obj)) {
      throw NumericError("identify: optimizer produced no finite objective");
    }

    MeterWeights weights;
    weights.w = finals[best];
    weights.beta = round_config.beta;
    weights.objective = best_obj;
    weights.meters = moments.columns;
    weights.binarized.resize(m);
    for (int i = 0; i < m; ++i) weights.binarized[i] = weights.w[i] > weights.threshold;
    best_weights = std::move(weights);
  }

  if (std::all_of(best_weights.binarized.begin(), best_weights.binarized.end(),
                  [](bool b) { return b; })) {
    throw ConfigError(
        "identify: the optimum masks every meter; increase beta to penalize flagging");
  }
  return best_weights;
}

TimeSeriesRecord apply_mask_to_inference_inputs(const TimeSeriesRecord& record,
                                                const MeterWeights& weights) {
  std::vector<int> keep;
  for (int col : record.meter_set) {
    bool drop = false;
    for (size_t i = 0; i < weights.meters.size(); ++i) {
      if (weights.meters[i] == col && weights.binarized[i]) drop = true;
    }
    if (!drop) keep.push_back(col);
  }
  if (keep.empty()) {
    throw ConfigError("apply_mask_to_inference_inputs: every meter is flagged as corrupted");
  }
  return restrict_to_meters(record, keep);
}

nlohmann::json weights_to_json(const MeterWeights& weights, const GridModel& model) {
  nlohmann::json doc;
  doc["format"] = "gridgp-identification-v1";
  doc["beta"] = weights.beta;
  doc["threshold"] = weights.threshold;
  doc["objective"] = weights.objective;
  doc["meters"] = weights.meters;
  std::vector<int> ids;
  for (int g : weights.meters) ids.push_back(model.generator_ids[g]);
  doc["meter_ids"] = ids;
  doc["w"] = std::vector<double>(weights.w.data(), weights.w.data() + weights.w.size());
  doc["binarized"] = weights.binarized;
  std::vector<int> flagged_ids;
  for (int g : weights.flagged()) flagged_ids.push_back(model.generator_ids[g]);
  doc["flagged_ids"] = flagged_ids;
  return doc;
}

}  // namespace gridgp
