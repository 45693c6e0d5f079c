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

#include "gridgp/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "gridgp/errors.hpp"

namespace gridgp {

const Matrix& Moments::at_lag_ticks(int ticks) const {
  for (size_t k = 0; k < lag_ticks.size(); ++k) {
    if (lag_ticks[k] == ticks) return C[k];
  }
  throw ConfigError("moments have no entry for lag of " + std::to_string(ticks) + " ticks");
}

Moments sample_moments(const TimeSeriesRecord& record, const std::vector<double>& lags_seconds) {
  record.validate();
  if (lags_seconds.empty()) throw ConfigError("sample_moments: lag set is empty");
  const int T = record.ticks();

  Moments moments;
  moments.columns = record.columns;
  moments.reporting_rate = record.reporting_rate;

  // Snap each lag to the tick grid: within half a tick snaps with a warning,
  // anything further is rejected with the nearest representable lag.
  for (double lag : lags_seconds) {
    const double exact_ticks = lag * record.reporting_rate;
    const long snapped = std::llround(exact_ticks);
    const double off = std::abs(exact_ticks - snapped);
    if (off > 0.5 + 1e-9) {
      throw ConfigError("lag " + format_double(lag) +
                        " s is not a multiple of the reporting interval; nearest representable lag is " +
                        format_double(snapped / record.reporting_rate) + " s");
    }
    if (off > 1e-9) {
      moments.warnings.push_back("lag " + format_double(lag) + " s snapped to " +
                                 format_double(snapped / record.reporting_rate) + " s (" +
                                 std::to_string(snapped) + " ticks)");
    }
    if (std::abs(snapped) >= T) {
      throw ConfigError("lag " + format_double(lag) + " s exceeds the record length");
    }
    moments.lag_ticks.push_back(static_cast<int>(snapped));
    moments.lags.push_back(snapped / record.reporting_rate);
  }

  Matrix centered = record.values;
  const Eigen::RowVectorXd means = centered.colwise().mean();
  centered.rowwise() -= means;

  moments.C.resize(moments.lags.size());
  parallel_for(static_cast<int>(moments.lags.size()), [&](int k) {
    const int lag = moments.lag_ticks[k];
    const int t0 = std::max(0, -lag);
    const int t1 = T - std::max(0, lag);  // exclusive
    const int span = t1 - t0;
    const auto lead = centered.middleRows(t0 + lag, span);
    const auto base = centered.middleRows(t0, span);
    moments.C[k] = (lead.transpose() * base) / static_cast<double>(span);
  });
  return moments;
}

Moments to_correlation(const Moments& moments, const Vector& stds) {
  if (stds.size() != moments.width()) {
    throw ConfigError("to_correlation: std vector length does not match moment width");
  }
  for (int i = 0; i < stds.size(); ++i) {
    if (!(stds[i] > 0.0) || !std::isfinite(stds[i])) {
      throw ConfigError("to_correlation: meter for generator index " +
                        std::to_string(moments.columns[i]) +
                        " has zero (or invalid) standard deviation; the signal is flat");
    }
  }
  Moments out = moments;
  const Vector inv = stds.cwiseInverse();
  for (auto& c : out.C) c = inv.asDiagonal() * c * inv.asDiagonal();
  return out;
}

Vector sample_stds(const Moments& moments) {
  const Matrix& c0 = moments.at_lag_ticks(0);
  return c0.diagonal().cwiseMax(0.0).cwiseSqrt();
}

Matrix mode_gain(const GridModel& model, const EigenBasis& basis, const std::vector<int>& selector) {
  if (selector.empty()) throw ConfigError("selector is empty");
  const int r = basis.r();
  Matrix gain(static_cast<int>(selector.size()), r);
  for (size_t p = 0; p < selector.size(); ++p) {
    const int g = selector[p];
    if (g < 0 || g >= model.n) {
      throw ConfigError("selector generator index " + std::to_string(g) + " out of range");
    }
    const double w = 1.0 / std::sqrt(model.inertia[g]);
    for (int i = 0; i < r; ++i) gain(static_cast<int>(p), i) = w * basis.V(g, basis.retained_modes[i]);
  }
  return gain;
}

Matrix sigma_of_A(const LearnedCovariance& learned, double tau, const std::vector<int>& selector) {
  const Matrix gain = mode_gain(learned.model, learned.basis, selector);
  const double abs_tau = std::abs(tau);
  const Matrix& k = learned.kernel.at(abs_tau);
  Matrix core = learned.A.cwiseProduct(tau >= 0.0 ? k : Matrix(k.transpose()));
  return gain * core * gain.transpose();
}

Matrix psd_clamped(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw NumericError("psd_clamped: eigendecomposition failed");
  if (es.eigenvalues().minCoeff() >= 0.0) return sym;
  const Vector clamped = es.eigenvalues().cwiseMax(0.0);
  Matrix out = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

std::vector<Matrix> sigma_tick_table(const LearnedCovariance& learned, const std::vector<int>& rows,
                                     const std::vector<int>& cols, int window_ticks,
                                     double tick_interval) {
  if (window_ticks < 1) throw ConfigError("sigma_tick_table: window must be at least one tick");
  if (!(tick_interval > 0.0)) throw ConfigError("sigma_tick_table: tick interval must be positive");
  const Matrix gain_rows = mode_gain(learned.model, learned.basis, rows);
  const Matrix gain_cols = mode_gain(learned.model, learned.basis, cols);
  const Matrix a_psd = psd_clamped(learned.A);

  std::vector<Matrix> table(window_ticks);
  const Vector& lambda = learned.kernel.lambda;
  const double gamma = learned.kernel.gamma;
  const int r = learned.modes();
  parallel_for(window_ticks, [&](int l) {
    Matrix k(r, r);
    const double tau = l * tick_interval;
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < r; ++j) k(i, j) = kernel_value(gamma, lambda[i], lambda[j], tau);
    }
    table[l] = gain_rows * a_psd.cwiseProduct(k) * gain_cols.transpose();
  });
  return table;
}

nlohmann::json learned_to_json(const LearnedCovariance& learned) {
  nlohmann::json doc;
  doc["format"] = "gridgp-learned-v1";
  doc["retained_modes"] = learned.basis.retained_modes;
  doc["lags_seconds"] = learned.kernel.lags;
  doc["meter_columns"] = learned.meter_columns;
  doc["normalization_stds"] =
      std::vector<double>(learned.normalization.data(),
                          learned.normalization.data() + learned.normalization.size());
  if (learned.band_hz) doc["band_hz"] = {(*learned.band_hz)[0], (*learned.band_hz)[1]};
  const int r = learned.modes();
  std::vector<double> a_flat(r * r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) a_flat[i * r + j] = learned.A(i, j);
  }
  doc["A"] = a_flat;
  doc["modes"] = r;
  return doc;
}

LearnedCovariance learned_from_json(const nlohmann::json& doc, const GridModel& model) {
  LearnedCovariance learned;
  try {
    learned.model = model;
    learned.basis = eigen_decompose(model);
    learned.basis.retained_modes = doc.at("retained_modes").get<std::vector<int>>();
    for (int m : learned.basis.retained_modes) {
      if (m < 0 || m >= model.n) throw ConfigError("retained mode index out of range");
    }
    const auto lags = doc.at("lags_seconds").get<std::vector<double>>();
    learned.kernel = build_kernel_tensor(learned.basis, lags);
    learned.meter_columns = doc.at("meter_columns").get<std::vector<int>>();
    const auto stds = doc.at("normalization_stds").get<std::vector<double>>();
    learned.normalization = Eigen::Map<const Vector>(stds.data(), stds.size());
    if (doc.contains("band_hz") && !doc.at("band_hz").is_null()) {
      const auto band = doc.at("band_hz").get<std::vector<double>>();
      learned.band_hz = {band.at(0), band.at(1)};
    }
    const int r = doc.at("modes").get<int>();
    const auto a_flat = doc.at("A").get<std::vector<double>>();
    if (static_cast<int>(a_flat.size()) != r * r || r != learned.basis.r()) {
      throw ConfigError("learned document: A dimensions inconsistent with retained modes");
    }
    learned.A.resize(r, r);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < r; ++j) learned.A(i, j) = a_flat[i * r + j];
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("learned document malformed: ") + e.what());
  }
  return learned;
}

void save_learned(const LearnedCovariance& learned, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write learned model file: " + path);
  out << learned_to_json(learned).dump(2) << "\n";
}

LearnedCovariance load_learned(const std::string& path, const GridModel& model) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open learned model file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse learned model file " + path + ": " + e.what());
  }
  return learned_from_json(doc, model);
}

void export_moment_csv(const Moments& moments, const GridModel& model, double lag,
                       const std::string& path) {
  const Matrix* c = nullptr;
  for (size_t k = 0; k < moments.lags.size(); ++k) {
    if (std::abs(moments.lags[k] - lag) <= 1e-9 * std::max(1.0, std::abs(lag))) c = &moments.C[k];
  }
  if (!c) throw ConfigError("export_moment_csv: lag not present in moments");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write moment export: " + path);
  out << "meter";
  for (int g : moments.columns) out << ",g" << model.generator_ids[g];
  out << "\n";
  for (int i = 0; i < moments.width(); ++i) {
    out << "g" << model.generator_ids[moments.columns[i]];
    for (int j = 0; j < moments.width(); ++j) out << "," << format_double((*c)(i, j));
    out << "\n";
  }
}

}  // namespace gridgp
