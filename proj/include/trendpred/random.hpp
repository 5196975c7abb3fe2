/*
 * Copyright 2026 The trendpred Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace trendpred {

/// Seeded random source whose output sequence is identical on every platform.
///
/// The engine is std::mt19937_64 (fully specified by the standard). The
/// standard distributions are not, so the few we need are written against
/// the raw 64-bit stream.
class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 bits of precision.
  double uniform();

  /// Uniform double in the open interval (0, 1).
  double uniform_open();

  double exponential(double mean);

  std::uint64_t poisson(double mean);

  /// k distinct values from [0, population) in ascending order.
  std::vector<std::uint64_t> sample_without_replacement(std::uint64_t population,
                                                        std::uint64_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace trendpred
