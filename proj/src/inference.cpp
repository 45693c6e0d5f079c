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

#include "gridgp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <Eigen/Dense>

#include "gridgp/errors.hpp"

namespace gridgp {

namespace {

constexpr double kBaseJitter = 1e-8;
constexpr double kMaxJitter = 1e-4;

// Cholesky with jitter escalation. `jitter` holds the relative jitter already
// applied; a failed factorization, or one too ill-conditioned to be
// meaningful, bumps the diagonal by the next rung.
Eigen::LLT<Matrix> robust_llt(Matrix& sigma, double& jitter_rel) {
  const double scale = sigma.trace() / sigma.rows();
  while (true) {
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() == Eigen::Success) {
      const auto diag = llt.matrixLLT().diagonal();
      const double lo = diag.minCoeff(), hi = diag.maxCoeff();
      if (lo > 0.0 && lo / hi > 1e-8) return llt;
    }
    double next = jitter_rel <= 0.0 ? kBaseJitter : jitter_rel * 10.0;
    if (next > kMaxJitter) {
      throw NumericError(
          "conditioning covariance is not positive definite even after jitter escalation to " +
          format_double(kMaxJitter) + " relative");
    }
    sigma.diagonal().array() += (next - std::max(jitter_rel, 0.0)) * scale;
    jitter_rel = next;
  }
}

}  // namespace

JointBlocks assemble_blocks(const LearnedCovariance& learned, const std::vector<int>& meters,
                            const std::vector<int>& targets, int ticks, double tick_interval,
                            bool with_target_block) {
  if (ticks < 1) throw ConfigError("assemble_blocks: window must have at least one tick");
  if (meters.empty()) throw ConfigError("assemble_blocks: conditioning meter set is empty");

  // One lag table over the union keeps both signs available: the (t, s)
  // block for t >= s is table[t-s], the mirrored block is its transpose.
  std::vector<int> universe = meters;
  for (int t : targets) universe.push_back(t);
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  const auto table = sigma_tick_table(learned, universe, universe, ticks, tick_interval);
  auto pos = [&](int gen) {
    return static_cast<int>(std::lower_bound(universe.begin(), universe.end(), gen) -
                            universe.begin());
  };

  const int m = static_cast<int>(meters.size());
  const int nt = static_cast<int>(targets.size());
  JointBlocks blocks;
  blocks.ticks = ticks;
  blocks.meters = meters;
  blocks.targets = targets;
  blocks.tick_interval = tick_interval;

  blocks.sigma11.resize(m * ticks, m * ticks);
  for (int t = 0; t < ticks; ++t) {
    for (int s = 0; s <= t; ++s) {
      const Matrix& sig = table[t - s];
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          const double v = sig(pos(meters[i]), pos(meters[j]));
          blocks.sigma11(t * m + i, s * m + j) = v;
          blocks.sigma11(s * m + j, t * m + i) = v;
        }
      }
    }
  }
  const double scale = blocks.sigma11.trace() / blocks.sigma11.rows();
  blocks.sigma11.diagonal().array() += kBaseJitter * scale;
  blocks.jitter = kBaseJitter;

  blocks.sigma21.resize(nt * ticks, m * ticks);
  for (int t = 0; t < ticks; ++t) {
    for (int s = 0; s < ticks; ++s) {
      const Matrix& sig = table[std::abs(t - s)];
      for (int a = 0; a < nt; ++a) {
        for (int j = 0; j < m; ++j) {
          blocks.sigma21(t * nt + a, s * m + j) = t >= s ? sig(pos(targets[a]), pos(meters[j]))
                                                         : sig(pos(meters[j]), pos(targets[a]));
        }
      }
    }
  }

  if (with_target_block) {
    blocks.sigma22.resize(nt * ticks, nt * ticks);
    for (int t = 0; t < ticks; ++t) {
      for (int s = 0; s < ticks; ++s) {
        const Matrix& sig = table[std::abs(t - s)];
        for (int a = 0; a < nt; ++a) {
          for (int b = 0; b < nt; ++b) {
            blocks.sigma22(t * nt + a, s * nt + b) = t >= s ? sig(pos(targets[a]), pos(targets[b]))
                                                            : sig(pos(targets[b]), pos(targets[a]));
          }
        }
      }
    }
  }

  blocks.mu1 = Vector::Zero(m * ticks);
  blocks.mu2 = Vector::Zero(nt * ticks);
  return blocks;
}

Vector conditional_mean(const JointBlocks& blocks, const Vector& x1) {
  if (x1.size() != blocks.sigma11.rows()) {
    throw ConfigError("conditional_mean: observation vector length " + std::to_string(x1.size()) +
                      " does not match sigma11 dimension " + std::to_string(blocks.sigma11.rows()));
  }
  Matrix sigma = blocks.sigma11;
  double jitter = blocks.jitter;
  const auto llt = robust_llt(sigma, jitter);
  return blocks.mu2 + blocks.sigma21 * llt.solve(x1 - blocks.mu1);
}

Matrix conditional_cov(const JointBlocks& blocks) {
  if (blocks.sigma22.size() == 0) {
    throw ConfigError("conditional_cov: blocks were assembled without the target block");
  }
  Matrix sigma = blocks.sigma11;
  double jitter = blocks.jitter;
  const auto llt = robust_llt(sigma, jitter);
  Matrix post = blocks.sigma22 - blocks.sigma21 * llt.solve(blocks.sigma21.transpose());
  return 0.5 * (post + post.transpose());
}

Prediction predict_with_conditioning(const LearnedCovariance& learned,
                                     const TimeSeriesRecord& record,
                                     const std::vector<int>& conditioning_meters,
                                     const std::vector<TargetSpec>& targets,
                                     const PredictOptions& options) {
  record.validate();
  if (conditioning_meters.empty()) throw ConfigError("prediction has no conditioning meters");
  if (targets.empty()) throw ConfigError("prediction has no targets");
  const int w = options.window_ticks;
  if (w < 1 || options.window_start < 0 || options.window_start + w > record.ticks()) {
    throw ConfigError("prediction window [" + std::to_string(options.window_start) + ", " +
                      std::to_string(options.window_start + w) + ") exceeds the record of " +
                      std::to_string(record.ticks()) + " ticks");
  }

  const int m = static_cast<int>(conditioning_meters.size());
  std::vector<int> universe = conditioning_meters;
  for (const auto& t : targets) {
    for (const auto& [gen, weight] : t.combo) universe.push_back(gen);
  }
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  const auto table =
      sigma_tick_table(learned, universe, universe, w, record.tick_interval());
  auto pos = [&](int gen) {
    return static_cast<int>(std::lower_bound(universe.begin(), universe.end(), gen) -
                            universe.begin());
  };

  Matrix sigma11(m * w, m * w);
  for (int t = 0; t < w; ++t) {
    for (int s = 0; s <= t; ++s) {
      const Matrix& sig = table[t - s];
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          const double v = sig(pos(conditioning_meters[i]), pos(conditioning_meters[j]));
          sigma11(t * m + i, s * m + j) = v;
          sigma11(s * m + j, t * m + i) = v;
        }
      }
    }
  }
  const double scale = sigma11.trace() / sigma11.rows();
  sigma11.diagonal().array() += kBaseJitter * scale;
  double jitter = kBaseJitter;
  const auto llt = robust_llt(sigma11, jitter);

  Vector x1(m * w);
  for (int t = 0; t < w; ++t) {
    for (int i = 0; i < m; ++i) {
      const int col = record.column_of(conditioning_meters[i]);
      if (col < 0) {
        throw ConfigError("prediction: conditioning generator index " +
                          std::to_string(conditioning_meters[i]) + " missing from the record");
      }
      x1[t * m + i] = record.values(options.window_start + t, col);
    }
  }
  const Vector alpha = llt.solve(x1);

  Prediction out;
  out.window_start = options.window_start;
  out.mean.resize(w, static_cast<int>(targets.size()));
  if (options.with_std) out.stddev.resize(w, static_cast<int>(targets.size()));

  Vector cross(m * w);
  for (size_t a = 0; a < targets.size(); ++a) {
    out.target_columns.push_back(targets[a].column);
    out.labels.push_back(targets[a].label);
    for (int t = 0; t < w; ++t) {
      for (int s = 0; s < w; ++s) {
        const Matrix& sig = table[std::abs(t - s)];
        for (int j = 0; j < m; ++j) {
          double v = 0.0;
          for (const auto& [gen, weight] : targets[a].combo) {
            v += weight * (t >= s ? sig(pos(gen), pos(conditioning_meters[j]))
                                  : sig(pos(conditioning_meters[j]), pos(gen)));
          }
          cross[s * m + j] = v;
        }
      }
      out.mean(t, static_cast<int>(a)) = cross.dot(alpha);
      if (options.with_std) {
        double prior = 0.0;
        for (const auto& [gi, wi] : targets[a].combo) {
          for (const auto& [gj, wj] : targets[a].combo) {
            prior += wi * wj * table[0](pos(gi), pos(gj));
          }
        }
        const double reduction = cross.dot(llt.solve(cross));
        out.stddev(t, static_cast<int>(a)) = std::sqrt(std::max(prior - reduction, 0.0));
      }
    }
  }
  return out;
}

Prediction predict_nonmetered(const LearnedCovariance& learned, const TimeSeriesRecord& record,
                              const MeterWeights* weights, const std::vector<int>& targets,
                              const PredictOptions& options) {
  if (targets.empty()) throw ConfigError("predict_nonmetered: target set is empty");
  TimeSeriesRecord working = record;
  if (weights) working = apply_mask_to_inference_inputs(record, *weights);

  const std::set<int> meter_set(working.meter_set.begin(), working.meter_set.end());
  for (int t : targets) {
    if (meter_set.count(t)) {
      throw ConfigError("predict_nonmetered: target generator index " + std::to_string(t) +
                        " is metered; targets must be disjoint from the conditioning meters");
    }
    if (t < 0 || t >= learned.model.n) {
      throw ConfigError("predict_nonmetered: target generator index out of range");
    }
  }

  std::vector<TargetSpec> specs;
  for (int t : targets) {
    specs.push_back({{{t, 1.0}}, "g" + std::to_string(learned.model.generator_ids[t]), t});
  }
  return predict_with_conditioning(learned, working, working.meter_set, specs, options);
}

void save_prediction_csv(const Prediction& prediction, const GridModel& model,
                         double reporting_rate, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write prediction file: " + path);
  out << "time";
  for (size_t a = 0; a < prediction.labels.size(); ++a) {
    out << ",predicted_" << prediction.labels[a];
    if (prediction.stddev.size()) out << ",predicted_" << prediction.labels[a] << "_std";
  }
  out << "\n";
  for (int t = 0; t < prediction.mean.rows(); ++t) {
    out << format_double((prediction.window_start + t) / reporting_rate);
    for (int a = 0; a < prediction.mean.cols(); ++a) {
      out << "," << format_double(prediction.mean(t, a));
      if (prediction.stddev.size()) out << "," << format_double(prediction.stddev(t, a));
    }
    out << "\n";
  }
  (void)model;
}

}  // namespace gridgp
