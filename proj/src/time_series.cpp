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

#include "gridgp/time_series.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <set>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "gridgp/errors.hpp"

namespace gridgp {

int TimeSeriesRecord::column_of(int generator_index) const {
  for (int c = 0; c < width(); ++c) {
    if (columns[c] == generator_index) return c;
  }
  return -1;
}

void TimeSeriesRecord::validate() const {
  if (ticks() < 2) throw ConfigError("time series must contain at least 2 ticks");
  if (!(reporting_rate > 0.0)) throw ConfigError("reporting rate must be positive");
  if (static_cast<int>(columns.size()) != width()) {
    throw ConfigError("column index list does not match the value matrix width");
  }
  if (!values.allFinite()) throw NumericError("time series contains NaN or Inf entries");
  const std::set<int> cols(columns.begin(), columns.end());
  if (static_cast<int>(cols.size()) != width()) throw ConfigError("duplicate columns in time series");
  for (int m : meter_set) {
    if (!cols.count(m)) {
      throw ConfigError("meter_set references generator index " + std::to_string(m) +
                        " which is not a column of the record");
    }
  }
}

TimeSeriesRecord restrict_to_meters(const TimeSeriesRecord& record, const std::vector<int>& meters) {
  if (meters.empty()) throw ConfigError("restrict_to_meters: meter set is empty");
  TimeSeriesRecord out = record;
  out.values.resize(record.ticks(), static_cast<int>(meters.size()));
  out.columns.clear();
  for (size_t j = 0; j < meters.size(); ++j) {
    const int c = record.column_of(meters[j]);
    if (c < 0) {
      throw ConfigError("restrict_to_meters: generator index " + std::to_string(meters[j]) +
                        " is not a column of the record");
    }
    out.values.col(static_cast<int>(j)) = record.values.col(c);
    out.columns.push_back(meters[j]);
  }
  out.meter_set = out.columns;
  return out;
}

TimeSeriesRecord bandpass_filter(const TimeSeriesRecord& record, double f_lo_hz, double f_hi_hz) {
  if (!(f_lo_hz >= 0.0) || !(f_lo_hz < f_hi_hz)) {
    throw ConfigError("bandpass_filter: band must satisfy 0 <= f_lo < f_hi");
  }
  record.validate();
  const int T = record.ticks();
  TimeSeriesRecord out = record;
  Eigen::FFT<double> fft;
  std::vector<double> time_buf(T);
  std::vector<std::complex<double>> freq(T);
  for (int c = 0; c < record.width(); ++c) {
    for (int t = 0; t < T; ++t) time_buf[t] = record.values(t, c);
    fft.fwd(freq, time_buf);
    for (int k = 0; k < T; ++k) {
      const double f = std::min(k, T - k) * record.reporting_rate / T;
      if (f < f_lo_hz || f > f_hi_hz) freq[k] = 0.0;
    }
    fft.inv(time_buf, freq);
    for (int t = 0; t < T; ++t) out.values(t, c) = time_buf[t];
  }
  out.metadata["bandpass_hz"] = {f_lo_hz, f_hi_hz};
  return out;
}

void save_series(const TimeSeriesRecord& record, const std::string& path, const GridModel& model) {
  record.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write series file: " + path);
  const std::string prefix = record.metadata.value("column_prefix", std::string());
  const std::string suffix = record.metadata.value("column_suffix", std::string());
  out << "time";
  for (int c : record.columns) {
    if (c < 0 || c >= model.n) throw ConfigError("series column index out of model range");
    out << "," << prefix << "g" << model.generator_ids[c] << suffix;
  }
  out << "\n";
  for (int t = 0; t < record.ticks(); ++t) {
    out << format_double(record.start_time + t / record.reporting_rate);
    for (int c = 0; c < record.width(); ++c) out << "," << format_double(record.values(t, c));
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path);

  nlohmann::json meta;
  meta["format"] = "gridgp-series-v1";
  meta["reporting_rate"] = record.reporting_rate;
  meta["start_time"] = record.start_time;
  meta["columns"] = record.columns;
  std::vector<int> labels;
  for (int c : record.columns) labels.push_back(model.generator_ids[c]);
  meta["column_ids"] = labels;
  meta["meter_set"] = record.meter_set;
  meta["seed"] = record.seed;
  meta["units"] = record.units;
  meta["metadata"] = record.metadata;
  std::ofstream meta_out(path + ".meta.json");
  if (!meta_out) throw IoError("cannot write series metadata sidecar: " + path + ".meta.json");
  meta_out << meta.dump(2) << "\n";
}

TimeSeriesRecord load_series(const std::string& path) {
  std::ifstream meta_in(path + ".meta.json");
  if (!meta_in) {
    throw IoError("metadata sidecar not found: " + path +
                  ".meta.json (series files are written with a JSON sidecar)");
  }
  nlohmann::json meta;
  try {
    meta_in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse series sidecar for " + path + ": " + e.what());
  }

  TimeSeriesRecord record;
  try {
    record.reporting_rate = meta.at("reporting_rate").get<double>();
    record.start_time = meta.value("start_time", 0.0);
    record.columns = meta.at("columns").get<std::vector<int>>();
    record.meter_set = meta.value("meter_set", record.columns);
    record.seed = meta.value("seed", std::uint64_t{0});
    record.units = meta.value("units", std::string("pu"));
    record.metadata = meta.value("metadata", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw IoError("series sidecar malformed for " + path + ": " + e.what());
  }

  std::ifstream in(path);
  if (!in) throw IoError("cannot open series file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("series file is empty: " + path);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != static_cast<int>(record.columns.size()) + 1) {
      throw IoError("series row width mismatch in " + path);
    }
    rows.push_back(std::move(row));
  }
  record.values.resize(static_cast<int>(rows.size()), static_cast<int>(record.columns.size()));
  for (size_t t = 0; t < rows.size(); ++t) {
    for (size_t c = 0; c + 1 < rows[t].size(); ++c) {
      record.values(static_cast<int>(t), static_cast<int>(c)) = rows[t][c + 1];
    }
  }
  record.validate();
  return record;
}

}  // namespace gridgp
