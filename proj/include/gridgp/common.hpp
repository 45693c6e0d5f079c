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

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>

namespace gridgp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Worker count used by parallel_for. 1 by default: results never depend on it,
// parallelism only splits writes to disjoint output slots.
void set_threads(int n);
int threads();

// Deterministic parallel map over [0, count); body(i) must write only to
// slot i of its output. Runs inline when threads() == 1 or count is small.
void parallel_for(int count, const std::function<void(int)>& body);

// splitmix64, used to derive independent seeds from a base seed and a tag.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt);
std::uint64_t mix_seed(std::uint64_t base, const std::string& tag);

std::string format_double(double v);  // round-trip precision, for file output

}  // namespace gridgp
