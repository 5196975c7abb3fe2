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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trendpred/predictors.hpp"
#include "trendpred/temporal_index.hpp"

namespace trendpred {

/// Realized future gains of every candidate at a cut, ascending by item id.
struct GroundTruth {
  CutSpec cut;
  std::vector<std::pair<ItemId, std::int64_t>> gains;

  /// Real ranking: descending gain, ties by ascending id.
  std::vector<ItemId> real_top_n(std::size_t n) const;
  std::size_t size() const { return gains.size(); }
};

GroundTruth make_ground_truth(const TemporalIndex& index, const CutSpec& cut);

enum class UndefinedReason {
  kNone,
  kEmptyCandidates,
  kEmptyNoveltySet,   ///< real top-n holds no item outside the past top-n
  kEmptyNegativeSet,  ///< every candidate is a positive
};

std::string to_string(UndefinedReason reason);

/// A metric value, or the reason it is undefined.
struct MetricValue {
  std::optional<double> value;
  UndefinedReason reason = UndefinedReason::kNone;

  static MetricValue of(double v) { return {v, UndefinedReason::kNone}; }
  static MetricValue undefined(UndefinedReason r) { return {std::nullopt, r}; }
  bool defined() const { return value.has_value(); }
  explicit operator bool() const { return value.has_value(); }
};

struct MetricTriple {
  std::size_t n = 0;            ///< requested list length
  std::size_t effective_n = 0;  ///< n clamped to the candidate count
  MetricValue p_n;
  MetricValue q_n;
  MetricValue auc;
};

/// Which top-n counts as "already popular" when deciding new entries.
enum class NoveltyBasis {
  kCumulativeDegree,  ///< top-n by k_o(t)
  kPastWindowGain,    ///< top-n by links received in (t - T_P, t]
};

/// Score table whose top-n defines the incumbents for novelty.
ScoreTable novelty_basis_table(const TemporalIndex& index, const CutSpec& cut,
                               NoveltyBasis basis = NoveltyBasis::kCumulativeDegree);

/// |predicted top-n  ∩  real top-n| / n, with n clamped to the candidate count.
MetricValue precision_at_n(const std::vector<ItemId>& predicted, const GroundTruth& truth,
                           std::size_t n);

/// Share of new entries (real top-n minus past top-n) that the prediction
/// places in its own top-n. Undefined when there are no new entries.
MetricValue novelty_q_n(const std::vector<ItemId>& predicted, const GroundTruth& truth,
                        const ScoreTable& past_rank_basis, std::size_t n);

/// Real top-n items are positives, the other candidates negatives. Each
/// (positive, negative) pair scores 1 if the positive outranks, 0.5 on a tie.
MetricValue auc(const ScoreTable& scores, const GroundTruth& truth, std::size_t n);

/// New entries at a cut: real top-n items not in the basis top-n, ascending.
std::vector<ItemId> new_entries(const GroundTruth& truth, const ScoreTable& past_rank_basis,
                                std::size_t n);

/// One triple per requested n. Throws ContractError on mismatched cuts or candidates.
std::vector<MetricTriple> evaluate(const ScoreTable& scores, const GroundTruth& truth,
                                   const ScoreTable& past_rank_basis,
                                   const std::vector<std::size_t>& ns);

}  // namespace trendpred
