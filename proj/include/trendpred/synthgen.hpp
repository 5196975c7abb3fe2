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

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "trendpred/event_log.hpp"
#include "trendpred/random.hpp"
#include "trendpred/temporal_index.hpp"

namespace trendpred {

enum class FitnessKind { kConstant, kUniform, kExponential };

std::string to_string(FitnessKind kind);
/// Accepts "constant", "uniform", "exponential".
FitnessKind parse_fitness_kind(const std::string& name);

/// Growth model: on day d an item i born on b_i attracts the next link with
/// probability proportional to (k_i + offset) * fitness_i * exp(-aging_rate * (d - b_i)).
struct SynthModelParams {
  Day horizon_days = 365;
  std::size_t links_per_day = 100;
  double new_items_per_day = 5.0;  ///< Poisson mean
  std::size_t n_users = 10000;
  double attachment_offset = 1.0;
  FitnessKind fitness = FitnessKind::kUniform;
  double fitness_mean = 1.0;  ///< exponential fitness only
  double aging_rate = 0.05;   ///< per day
  std::uint64_t seed = 42;

  /// Throws ContractError for nonpositive counts, offset <= 0 or a negative rate.
  void validate() const;
};

struct SynthItem {
  ItemId id = 0;
  Day birth_day = 0;
  double fitness = 1.0;
};

struct SynthTruth {
  std::vector<SynthItem> items;  ///< ascending id == birth order
  InteractionLog log;            ///< deduplicated per make_log()
};

/// Deterministic for a given params.seed. One item is always born on day 0.
SynthTruth generate(const SynthModelParams& params);

/// Items in the real top-n at the cut that were not in the top-n by degree.
std::vector<ItemId> label_potential_items(const SynthTruth& truth, const CutSpec& cut,
                                          std::size_t n);

/// `item_id,birth_day,fitness`
void write_truth_csv(std::ostream& out, const SynthTruth& truth);

/// Cumulative-weight sampler over a fixed number of slots (Fenwick tree).
class WeightedSampler {
 public:
  explicit WeightedSampler(std::size_t size = 0) : tree_(size + 1, 0.0), weights_(size, 0.0) {}

  std::size_t size() const { return weights_.size(); }
  /// Replaces every weight (and the size) in O(size).
  void assign(const std::vector<double>& weights);
  void set(std::size_t slot, double weight);
  double weight(std::size_t slot) const { return weights_[slot]; }
  double total() const;
  /// Slot drawn with probability weight / total. Throws Error if total <= 0.
  std::size_t sample(Random& rng) const;

 private:
  std::vector<double> tree_;  // 1-based Fenwick array
  std::vector<double> weights_;
};

}  // namespace trendpred
