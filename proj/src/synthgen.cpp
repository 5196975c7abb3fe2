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

#include "trendpred/synthgen.hpp"

#include <bit>
#include <cmath>

#include "trendpred/format.hpp"
#include "trendpred/metrics.hpp"

namespace trendpred {

std::string to_string(FitnessKind kind) {
  switch (kind) {
    case FitnessKind::kConstant:
      return "constant";
    case FitnessKind::kUniform:
      return "uniform";
    case FitnessKind::kExponential:
      return "exponential";
  }
  return "unknown";
}

FitnessKind parse_fitness_kind(const std::string& name) {
  if (name == "constant") return FitnessKind::kConstant;
  if (name == "uniform") return FitnessKind::kUniform;
  if (name == "exponential") return FitnessKind::kExponential;
  throw ContractError("unknown fitness distribution '" + name +
                      "' (expected constant, uniform or exponential)");
}

void SynthModelParams::validate() const {
  if (horizon_days < 1) throw ContractError("horizon_days must be at least 1");
  if (links_per_day < 1) throw ContractError("links_per_day must be at least 1");
  if (n_users < 1) throw ContractError("n_users must be at least 1");
  if (!(new_items_per_day >= 0.0)) throw ContractError("new_items_per_day must be nonnegative");
  if (!(attachment_offset > 0.0)) throw ContractError("attachment_offset must be positive");
  if (!(aging_rate >= 0.0)) throw ContractError("aging rate must be nonnegative");
  if (fitness == FitnessKind::kExponential && !(fitness_mean > 0.0)) {
    throw ContractError("exponential fitness needs a positive mean");
  }
}

void WeightedSampler::assign(const std::vector<double>& weights) {
  weights_ = weights;
  tree_.assign(weights.size() + 1, 0.0);
  for (std::size_t i = 1; i <= weights.size(); ++i) {
    tree_[i] += weights[i - 1];
    const std::size_t parent = i + (i & (~i + 1));
    if (parent <= weights.size()) tree_[parent] += tree_[i];
  }
}

void WeightedSampler::set(std::size_t slot, double weight) {
  const double delta = weight - weights_[slot];
  weights_[slot] = weight;
  for (std::size_t i = slot + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
}

double WeightedSampler::total() const {
  double sum = 0.0;
  for (std::size_t i = weights_.size(); i > 0; i -= i & (~i + 1)) sum += tree_[i];
  return sum;
}

std::size_t WeightedSampler::sample(Random& rng) const {
  const double sum = total();
  if (!(sum > 0.0)) throw Error("attachment weights sum to zero; nothing can be sampled");
  double target = rng.uniform() * sum;
  // Descend to the largest position whose prefix sum is <= target.
  std::size_t pos = 0;
  for (std::size_t step = std::bit_floor(weights_.size()); step > 0; step >>= 1) {
    if (pos + step < tree_.size() && tree_[pos + step] <= target) {
      pos += step;
      target -= tree_[pos];
    }
  }
  // Rounding can land on a zero-weight slot or run off the end; walk back.
  std::size_t slot = std::min(pos, weights_.size() - 1);
  while (weights_[slot] <= 0.0 && slot > 0) --slot;
  while (weights_[slot] <= 0.0) ++slot;
  return slot;
}

SynthTruth generate(const SynthModelParams& params) {
  params.validate();
  Random rng(params.seed);
  SynthTruth truth;
  std::vector<double> degree;

  const auto draw_fitness = [&] {
    switch (params.fitness) {
      case FitnessKind::kConstant:
        return 1.0;
      case FitnessKind::kUniform:
        return rng.uniform_open();
      case FitnessKind::kExponential:
        return rng.exponential(params.fitness_mean);
    }
    return 1.0;
  };
  const auto add_item = [&](Day day) {
    truth.items.push_back(SynthItem{truth.items.size(), day, draw_fitness()});
    degree.push_back(0.0);
  };

  std::vector<InteractionEvent> events;
  events.reserve(static_cast<std::size_t>(params.horizon_days) * params.links_per_day);
  WeightedSampler sampler;
  std::vector<double> aging;
  for (Day day = 0; day < params.horizon_days; ++day) {
    if (day == 0) add_item(0);
    for (std::uint64_t b = rng.poisson(params.new_items_per_day); b > 0; --b) add_item(day);

    // Aging relative to the youngest item; a common factor does not change the draw.
    const Day youngest = truth.items.back().birth_day;
    aging.resize(truth.items.size());
    std::vector<double> weights(truth.items.size());
    for (std::size_t i = 0; i < truth.items.size(); ++i) {
      const auto& item = truth.items[i];
      aging[i] = item.fitness *
                 std::exp(-params.aging_rate * static_cast<double>(youngest - item.birth_day));
      weights[i] = (degree[i] + params.attachment_offset) * aging[i];
    }
    sampler.assign(weights);

    for (std::size_t link = 0; link < params.links_per_day; ++link) {
      const std::size_t slot = sampler.sample(rng);
      const UserId user = rng.below(params.n_users);
      events.push_back(InteractionEvent{user, truth.items[slot].id, day, std::nullopt});
      degree[slot] += 1.0;
      sampler.set(slot, (degree[slot] + params.attachment_offset) * aging[slot]);
    }
  }
  truth.log = make_log(std::move(events), "synthetic day index");
  return truth;
}

std::vector<ItemId> label_potential_items(const SynthTruth& truth, const CutSpec& cut,
                                          std::size_t n) {
  const TemporalIndex index = TemporalIndex::build(truth.log);
  const GroundTruth real = make_ground_truth(index, cut);
  return new_entries(real, score_total_popularity(index, cut), n);
}

void write_truth_csv(std::ostream& out, const SynthTruth& truth) {
  out << "item_id,birth_day,fitness\n";
  for (const auto& item : truth.items) {
    out << item.id << ',' << item.birth_day << ',' << format_double(item.fitness) << '\n';
  }
}

}  // namespace trendpred
