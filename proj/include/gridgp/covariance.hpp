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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gridgp/kernel.hpp"
#include "gridgp/time_series.hpp"

namespace gridgp {

/// Lagged sample moments C_tau = (1/T') sum_t z(t+tau) z(t)^T of mean-removed
/// columns. Lags are snapped to the nearest reporting tick when within half
/// a tick (with a warning) and rejected otherwise.
struct Moments {
  std::vector<double> lags;     // seconds, snapped
  std::vector<int> lag_ticks;   // signed tick offsets
  std::vector<Matrix> C;        // m x m per lag
  std::vector<int> columns;     // generator indices, row/col order
  double reporting_rate{0.0};
  std::vector<std::string> warnings;

  int width() const { return static_cast<int>(columns.size()); }
  const Matrix& at_lag_ticks(int ticks) const;
};

Moments sample_moments(const TimeSeriesRecord& record, const std::vector<double>& lags_seconds);

// Entrywise division of every C_tau by std_i * std_j.
Moments to_correlation(const Moments& moments, const Vector& stds);

// sqrt of the diagonal of C_0; requires lag 0 to be present.
Vector sample_stds(const Moments& moments);

/// Everything required to evaluate the model covariance
///   Sigma_tau(A) = S M^{-1/2} V_r (A o K_tau) V_r^T M^{-1/2} S^T
/// over any generator selection: the fitted symmetric parameter matrix A,
/// the kernel, the eigenbasis with its retained modes and the model.
/// `normalization` records the per-meter standard deviations the fit used
/// for correlation scaling (A itself stays in covariance units).
struct LearnedCovariance {
  Matrix A;                        // r x r symmetric
  KernelTensor kernel;
  EigenBasis basis;
  GridModel model;
  Vector normalization;            // per meter, aligned with meter_columns
  std::vector<int> meter_columns;  // generator indices the moments were over
  std::optional<std::array<double, 2>> band_hz;

  int modes() const { return static_cast<int>(A.rows()); }
};

// Rows of M^{-1/2} V_r for the selected generators (the map from eigeninput
// space to observed speeds).
Matrix mode_gain(const GridModel& model, const EigenBasis& basis, const std::vector<int>& selector);

// Selected block of Sigma_tau(A); tau must be a configured kernel lag
// (negative lags use stationarity).
Matrix sigma_of_A(const LearnedCovariance& learned, double tau, const std::vector<int>& selector);

// Nearest PSD version of a symmetric matrix (negative eigenvalues clamped
// to zero). Returns the input untouched when it is already PSD.
Matrix psd_clamped(const Matrix& sym);

// Sigma at every tick lag 0..window-1 over rows x cols, evaluated through
// the closed-form kernel. Shared by the inference paths. The fitted A may
// carry small negative eigenvalues (sampling noise on weakly excited
// directions; the fit does not project); those are clamped here so the
// assembled space-time covariance is a valid process covariance.
std::vector<Matrix> sigma_tick_table(const LearnedCovariance& learned, const std::vector<int>& rows,
                                     const std::vector<int>& cols, int window_ticks,
                                     double tick_interval);

nlohmann::json learned_to_json(const LearnedCovariance& learned);
LearnedCovariance learned_from_json(const nlohmann::json& doc, const GridModel& model);
void save_learned(const LearnedCovariance& learned, const std::string& path);
LearnedCovariance load_learned(const std::string& path, const GridModel& model);

// C_0 export for debugging, one labelled m x m grid in delimited text.
void export_moment_csv(const Moments& moments, const GridModel& model, double lag,
                       const std::string& path);

}  // namespace gridgp
