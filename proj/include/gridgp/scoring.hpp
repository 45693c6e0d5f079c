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

#include <vector>

#include "gridgp/common.hpp"

namespace gridgp {

// Root-mean-square error divided by the range of the actual signal:
// sqrt(sum_t (est - actual)^2 / T) / (max(actual) - min(actual)).
// Per-sample squared errors are summed before the root.
double normalized_rmse(const Vector& estimate, const Vector& actual);

struct IdentificationScore {
  double precision{1.0};  // 1 by convention when nothing is flagged
  double recall{1.0};     // 1 by convention when nothing is corrupted
  bool exact_match{false};
};

IdentificationScore score_identification(const std::vector<int>& flagged,
                                         const std::vector<int>& truth);

}  // namespace gridgp
