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

#include "trendpred/metrics.hpp"

#include <algorithm>
#include <unordered_set>

namespace trendpred {
namespace {

std::size_t clamp_n(std::size_t n, std::size_t candidates) { return std::min(n, candidates); }

void require_same_day(const CutSpec& a, const CutSpec& b, const char* what) {
  if (a.t != b.t) {
    throw ContractError(std::string(what) + ": cut day mismatch (" + std::to_string(a.t) +
                        " vs " + std::to_string(b.t) + ")");
  }
}

void require_same_candidates(const ScoreTable& scores, const GroundTruth& truth) {
  const bool same =
      scores.scores.size() == truth.gains.size() &&
      std::equal(scores.scores.begin(), scores.scores.end(), truth.gains.begin(),
                 [](const auto& s, const auto& g) { return s.first == g.first; });
  if (!same) throw ContractError("score table and ground truth cover different candidates");
}

std::unordered_set<ItemId> prefix_set(const std::vector<ItemId>& ranked, std::size_t n) {
  return {ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(std::min(n, ranked.size()))};
}

}  // namespace

std::vector<ItemId> GroundTruth::real_top_n(std::size_t n) const {
  std::vector<std::pair<ItemId, double>> as_scores;
  as_scores.reserve(gains.size());
  for (const auto& [item, gain] : gains) as_scores.emplace_back(item, static_cast<double>(gain));
  return rank_top_n(as_scores, n);
}

GroundTruth make_ground_truth(const TemporalIndex& index, const CutSpec& cut) {
  index.validate(cut);
  GroundTruth truth;
  truth.cut = cut;
  for (const ItemId item : index.candidate_items(cut.t)) {
    truth.gains.emplace_back(item, index.future_gain(item, cut));
  }
  return truth;
}

std::string to_string(UndefinedReason reason) {
  switch (reason) {
    case UndefinedReason::kNone:
      return "";
    case UndefinedReason::kEmptyCandidates:
      return "empty-candidate-set";
    case UndefinedReason::kEmptyNoveltySet:
      return "empty-novelty-set";
    case UndefinedReason::kEmptyNegativeSet:
      return "empty-negative-set";
  }
  return "unknown";
}

ScoreTable novelty_basis_table(const TemporalIndex& index, const CutSpec& cut,
                               NoveltyBasis basis) {
  if (basis == NoveltyBasis::kPastWindowGain) return score_pbp(index, cut, 1.0);
  return score_total_popularity(index, cut);
}

MetricValue precision_at_n(const std::vector<ItemId>& predicted, const GroundTruth& truth,
                           std::size_t n) {
  if (n == 0) throw ContractError("list length n must be positive");
  const std::size_t k = clamp_n(n, truth.size());
  if (k == 0) return MetricValue::undefined(UndefinedReason::kEmptyCandidates);
  const auto real = prefix_set(truth.real_top_n(k), k);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(k, predicted.size()); ++i) hits += real.contains(predicted[i]);
  return MetricValue::of(static_cast<double>(hits) / static_cast<double>(k));
}

std::vector<ItemId> new_entries(const GroundTruth& truth, const ScoreTable& past_rank_basis,
                                std::size_t n) {
  require_same_day(truth.cut, past_rank_basis.cut, "novelty basis");
  const std::size_t k = clamp_n(n, truth.size());
  const auto past = prefix_set(rank_top_n(past_rank_basis, k), k);
  std::vector<ItemId> out;
  for (const ItemId item : truth.real_top_n(k)) {
    if (!past.contains(item)) out.push_back(item);
  }
  std::sort(out.begin(), out.end());
  return out;
}

MetricValue novelty_q_n(const std::vector<ItemId>& predicted, const GroundTruth& truth,
                        const ScoreTable& past_rank_basis, std::size_t n) {
  if (n == 0) throw ContractError("list length n must be positive");
  const std::size_t k = clamp_n(n, truth.size());
  if (k == 0) return MetricValue::undefined(UndefinedReason::kEmptyCandidates);
  const auto fresh = new_entries(truth, past_rank_basis, n);
  if (fresh.empty()) return MetricValue::undefined(UndefinedReason::kEmptyNoveltySet);
  const auto top = prefix_set(predicted, k);
  std::size_t hits = 0;
  for (const ItemId item : fresh) hits += top.contains(item);
  return MetricValue::of(static_cast<double>(hits) / static_cast<double>(fresh.size()));
}

MetricValue auc(const ScoreTable& scores, const GroundTruth& truth, std::size_t n) {
  if (n == 0) throw ContractError("list length n must be positive");
  require_same_day(scores.cut, truth.cut, "auc");
  require_same_candidates(scores, truth);
  const std::size_t k = clamp_n(n, truth.size());
  if (k == 0) return MetricValue::undefined(UndefinedReason::kEmptyCandidates);
  const auto positives = prefix_set(truth.real_top_n(k), k);
  if (positives.size() == scores.size()) {
    return MetricValue::undefined(UndefinedReason::kEmptyNegativeSet);
  }
  std::vector<double> positive_scores;
  std::vector<double> negative_scores;
  for (const auto& [item, value] : scores.scores) {
    (positives.contains(item) ? positive_scores : negative_scores).push_back(value);
  }
  std::sort(negative_scores.begin(), negative_scores.end());
  // Twice the indicator sum, kept integral so the ratio is exact.
  std::uint64_t doubled = 0;
  for (const double s : positive_scores) {
    const auto [lo, hi] = std::equal_range(negative_scores.begin(), negative_scores.end(), s);
    doubled += 2 * static_cast<std::uint64_t>(lo - negative_scores.begin()) +
               static_cast<std::uint64_t>(hi - lo);
  }
  const double pairs = static_cast<double>(positive_scores.size()) *
                       static_cast<double>(negative_scores.size());
  return MetricValue::of(static_cast<double>(doubled) / (2.0 * pairs));
}

std::vector<MetricTriple> evaluate(const ScoreTable& scores, const GroundTruth& truth,
                                   const ScoreTable& past_rank_basis,
                                   const std::vector<std::size_t>& ns) {
  if (ns.empty()) throw ContractError("evaluate needs at least one list length");
  require_same_day(scores.cut, truth.cut, "evaluate");
  require_same_candidates(scores, truth);
  std::vector<MetricTriple> out;
  out.reserve(ns.size());
  for (const std::size_t n : ns) {
    const auto predicted = rank_top_n(scores, n);
    MetricTriple triple;
    triple.n = n;
    triple.effective_n = clamp_n(n, truth.size());
    triple.p_n = precision_at_n(predicted, truth, n);
    triple.q_n = novelty_q_n(predicted, truth, past_rank_basis, n);
    triple.auc = auc(scores, truth, n);
    out.push_back(triple);
  }
  return out;
}

}  // namespace trendpred
