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

#include "trendpred/random.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "trendpred/common.hpp"

namespace trendpred {

std::uint64_t Random::below(std::uint64_t bound) {
  if (bound == 0) throw ContractError("Random::below: bound must be positive");
  // Rejection sampling on the largest multiple of bound.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double Random::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Random::uniform_open() {
  double u;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

double Random::exponential(double mean) { return -mean * std::log(uniform_open()); }

std::uint64_t Random::poisson(double mean) {
  if (mean <= 0.0) return 0;
  // Knuth's product method, applied in chunks so exp(-chunk) never underflows.
  constexpr double kChunk = 30.0;
  std::uint64_t total = 0;
  double remaining = mean;
  while (remaining > 0.0) {
    const double lambda = std::min(remaining, kChunk);
    remaining -= lambda;
    const double limit = std::exp(-lambda);
    double p = uniform();
    while (p > limit) {
      ++total;
      p *= uniform();
    }
  }
  return total;
}

std::vector<std::uint64_t> Random::sample_without_replacement(std::uint64_t population,
                                                              std::uint64_t k) {
  if (k > population) {
    throw ContractError("cannot sample " + std::to_string(k) + " distinct values from " +
                        std::to_string(population));
  }
  // Floyd's algorithm: k draws regardless of population size.
  std::set<std::uint64_t> chosen;
  for (std::uint64_t j = population - k; j < population; ++j) {
    const std::uint64_t r = below(j + 1);
    if (!chosen.insert(r).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

}  // namespace trendpred
