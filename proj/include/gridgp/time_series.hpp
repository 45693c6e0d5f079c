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

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridgp/common.hpp"
#include "gridgp/grid_model.hpp"

namespace gridgp {

/// Sampled generator-speed measurements. Columns are identified by the
/// 0-based generator index in the owning model; generator labels are used
/// only at the file boundary. meter_set marks which columns count as
/// metered (defaults to all columns).
struct TimeSeriesRecord {
  Matrix values;               // ticks x columns
  double reporting_rate{0.0};  // samples / second
  double start_time{0.0};      // seconds
  std::vector<int> columns;    // generator index per column
  std::vector<int> meter_set;  // metered subset of columns
  std::uint64_t seed{0};
  std::string units{"pu"};
  nlohmann::json metadata;     // provenance (sim config, corruption tags, ...)

  int ticks() const { return static_cast<int>(values.rows()); }
  int width() const { return static_cast<int>(values.cols()); }
  double tick_interval() const { return 1.0 / reporting_rate; }
  int column_of(int generator_index) const;  // -1 when absent

  void validate() const;
};

TimeSeriesRecord restrict_to_meters(const TimeSeriesRecord& record, const std::vector<int>& meters);

// Zero-phase brick-wall bandpass applied per column via FFT. Keeps spectral
// content with |f| in [f_lo, f_hi] Hz; used for model reduction alongside
// select_modes.
TimeSeriesRecord bandpass_filter(const TimeSeriesRecord& record, double f_lo_hz, double f_hi_hz);

// CSV with header "time,g<ID>,...". A JSON sidecar at <path>.meta.json
// carries the reporting rate, column/meter indices and labels, seed, units
// and provenance; the loader requires it.
void save_series(const TimeSeriesRecord& record, const std::string& path, const GridModel& model);
TimeSeriesRecord load_series(const std::string& path);

}  // namespace gridgp
