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

#include "gridgp/simulator.hpp"

#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "gridgp/errors.hpp"

namespace gridgp {

void SimulationConfig::validate(int n) const {
  if (!(integration_step > 0.0)) throw ConfigError("integration_step must be positive");
  if (!(duration > 0.0)) throw ConfigError("duration must be positive");
  if (!(reporting_rate > 0.0)) throw ConfigError("reporting_rate must be positive");
  if (integration_step > 0.5 / reporting_rate + 1e-15) {
    throw ConfigError("integration_step must be <= 1/(2*reporting_rate); got " +
                      format_double(integration_step));
  }
  if (noise_intensity.rows() != n || noise_intensity.cols() != n) {
    throw ConfigError("noise intensity Q must be n x n");
  }
  const double scale = std::max(1.0, noise_intensity.norm());
  if ((noise_intensity - noise_intensity.transpose()).norm() > 1e-10 * scale) {
    throw ConfigError("noise intensity Q must be symmetric within 1e-10");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(noise_intensity, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw ConfigError("noise intensity Q must be positive semidefinite within 1e-10");
  }
  if (burn_in) {
    if (!(*burn_in >= 0.0)) throw ConfigError("burn_in must be nonnegative");
    if (*burn_in > duration) {
      throw ConfigError("duration (" + format_double(duration) +
                        " s) is shorter than the requested burn-in (" + format_double(*burn_in) +
                        " s); burn-in may take at most half the run");
    }
  }
  if (initial_speed.size() != 0 && initial_speed.size() != n) {
    throw ConfigError("initial_speed must have n entries when given");
  }
}

double SimulationConfig::resolved_burn_in(double gamma) const {
  if (burn_in) return *burn_in;
  return std::min(20.0 / gamma, duration);
}

TimeSeriesRecord simulate(const GridModel& model, const SimulationConfig& config) {
  model.validate();
  config.validate(model.n);

  const int n = model.n;
  const double h = config.integration_step;
  const double gamma = model.damping_ratio;
  const double burn = config.resolved_burn_in(gamma);
  const double delta = 1.0 / config.reporting_rate;
  const long ticks = std::llround(config.duration * config.reporting_rate);
  if (ticks < 2) throw ConfigError("duration * reporting_rate must yield at least 2 ticks");

  // Noise shaping: Q = U diag(l) U^T, samples are U sqrt(l) * xi.
  Eigen::SelfAdjointEigenSolver<Matrix> es(config.noise_intensity);
  if (es.info() != Eigen::Success) throw NumericError("simulate: eigendecomposition of Q failed");
  Vector sqrt_l = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix noise_shape = es.eigenvectors() * sqrt_l.asDiagonal();
  const bool noisy = sqrt_l.maxCoeff() > 0.0;

  const Vector inv_m = model.inertia.array().inverse();
  const long burn_steps = std::llround(burn / h);
  std::vector<long> sample_steps(ticks);
  for (long k = 0; k < ticks; ++k) sample_steps[k] = burn_steps + std::llround(k * delta / h);
  const long total_steps = sample_steps.back();

  Vector theta = Vector::Zero(n);
  Vector omega = config.initial_speed.size() ? config.initial_speed : Vector::Zero(n);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sqrt_h = std::sqrt(h);

  Matrix values(ticks, n);
  long next_sample = 0;
  Vector xi(n), kick(n);
  for (long step = 0;; ++step) {
    while (next_sample < ticks && sample_steps[next_sample] == step) {
      values.row(next_sample) = omega.transpose();
      ++next_sample;
    }
    if (step == total_steps) break;

    // theta' = omega;  omega' = -gamma*omega - M^-1 L theta + M^-1 p
    // Both updates use the state at the step start.
    Vector accel = -gamma * omega - inv_m.asDiagonal() * (model.laplacian * theta);
    theta += h * omega;
    if (noisy) {
      for (int i = 0; i < n; ++i) xi[i] = gauss(rng);
      kick.noalias() = noise_shape * xi;
      omega += h * accel + sqrt_h * (inv_m.asDiagonal() * kick);
    } else {
      omega += h * accel;
    }

    if (omega.cwiseAbs().maxCoeff() > 1e6 || theta.cwiseAbs().maxCoeff() > 1e6) {
      throw NumericError("simulate: integration unstable (state norm exceeded 1e6 at t=" +
                         format_double(step * h) + " s); reduce integration_step from " +
                         format_double(h));
    }
  }

  TimeSeriesRecord record;
  record.values = std::move(values);
  record.reporting_rate = config.reporting_rate;
  record.start_time = 0.0;
  record.columns.resize(n);
  for (int i = 0; i < n; ++i) record.columns[i] = i;
  record.meter_set = record.columns;
  record.seed = config.seed;
  record.units = "pu";
  record.metadata["sim_config"] = sim_config_to_json(config);
  record.metadata["burn_in_seconds"] = burn;
  return record;
}

SimulationConfig sim_config_from_json(const nlohmann::json& doc, int n) {
  SimulationConfig config;
  try {
    config.integration_step = doc.value("integration_step", config.integration_step);
    config.duration = doc.value("duration", config.duration);
    config.reporting_rate = doc.value("reporting_rate", config.reporting_rate);
    config.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("burn_in") && !doc.at("burn_in").is_null()) {
      config.burn_in = doc.at("burn_in").get<double>();
    }
    const auto& q = doc.at("noise_intensity");
    if (q.is_number()) {
      config.noise_intensity = q.get<double>() * Matrix::Identity(n, n);
    } else if (q.is_array() && !q.empty() && q.front().is_array()) {
      const auto rows = q.get<std::vector<std::vector<double>>>();
      if (static_cast<int>(rows.size()) != n) throw ConfigError("noise_intensity must be n x n");
      config.noise_intensity.resize(n, n);
      for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n) throw ConfigError("noise_intensity must be n x n");
        for (int j = 0; j < n; ++j) config.noise_intensity(i, j) = rows[i][j];
      }
    } else {
      const auto diag = q.get<std::vector<double>>();
      if (static_cast<int>(diag.size()) != n) {
        throw ConfigError("noise_intensity diagonal must have n entries");
      }
      config.noise_intensity = Eigen::Map<const Vector>(diag.data(), n).asDiagonal();
    }
    if (doc.contains("initial_speed")) {
      const auto v = doc.at("initial_speed").get<std::vector<double>>();
      config.initial_speed = Eigen::Map<const Vector>(v.data(), v.size());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("simulation config malformed: ") + e.what());
  }
  return config;
}

nlohmann::json sim_config_to_json(const SimulationConfig& config) {
  nlohmann::json doc;
  doc["integration_step"] = config.integration_step;
  doc["duration"] = config.duration;
  doc["reporting_rate"] = config.reporting_rate;
  doc["seed"] = config.seed;
  if (config.burn_in) doc["burn_in"] = *config.burn_in;
  const int n = static_cast<int>(config.noise_intensity.rows());
  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) q[i][j] = config.noise_intensity(i, j);
  }
  doc["noise_intensity"] = q;
  if (config.initial_speed.size()) {
    doc["initial_speed"] = std::vector<double>(config.initial_speed.data(),
                                               config.initial_speed.data() + config.initial_speed.size());
  }
  return doc;
}

}  // namespace gridgp
