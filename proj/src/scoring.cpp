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

#include "gridgp/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gridgp/errors.hpp"

namespace gridgp {

double normalized_rmse(const Vector& estimate, const Vector& actual) {
  if (estimate.size() != actual.size()) {
    throw ConfigError("normalized_rmse: series lengths differ");
  }
  if (estimate.size() < 1) throw ConfigError("normalized_rmse: series are empty");
  const double range = actual.maxCoeff() - actual.minCoeff();
  if (!(range > 0.0)) {
    throw ConfigError("normalized_rmse: actual signal is constant (zero range)");
  }
  const double mse = (estimate - actual).squaredNorm() / static_cast<double>(actual.size());
  return std::sqrt(mse) / range;
}

IdentificationScore score_identification(const std::vector<int>& flagged,
                                         const std::vector<int>& truth) {
  const std::set<int> f(flagged.begin(), flagged.end());
  const std::set<int> t(truth.begin(), truth.end());
  int hit = 0;
  for (int x : f) hit += t.count(x) ? 1 : 0;

  IdentificationScore score;
  score.precision = f.empty() ? 1.0 : static_cast<double>(hit) / f.size();
  score.recall = t.empty() ? 1.0 : static_cast<double>(hit) / t.size();
  score.exact_match = (f == t);
  return score;
}

}  // namespace gridgp
