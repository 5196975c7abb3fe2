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
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "trendpred/temporal_index.hpp"

namespace trendpred {

enum class PredictorKind { kTotalPopularity, kPbp, kProposed };

std::string to_string(PredictorKind kind);
/// Accepts "total", "pbp", "proposed".
PredictorKind parse_predictor_kind(const std::string& name);

/// How the lagged term of the popularity-based score is read.
enum class PbpForm {
  kLaggedDegree,  ///< k(t) - lambda * k(t - T_P)
  kWindowGain,    ///< k(t) - lambda * (k(t) - k(t - T_P))
};

struct PredictorSpec {
  PredictorKind kind = PredictorKind::kProposed;
  double lambda = 0.9;
  double gamma = 0.1;
  Day past_window = 30;
  DecayScope decay_scope = DecayScope::kAllLinks;
  PbpForm pbp_form = PbpForm::kLaggedDegree;

  /// Throws ContractError unless lambda in [0,1], gamma >= 0 and past_window >= 1.
  void validate() const;

  static PredictorSpec total() { return {PredictorKind::kTotalPopularity, 0.0, 0.0}; }
  static PredictorSpec pbp(double lambda, Day past_window = 30) {
    return {PredictorKind::kPbp, lambda, 0.0, past_window};
  }
  static PredictorSpec proposed(double lambda, double gamma, Day past_window = 30) {
    return {PredictorKind::kProposed, lambda, gamma, past_window};
  }

  friend bool operator==(const PredictorSpec&, const PredictorSpec&) = default;
};

enum class ScoreStatus {
  kOk,
  kAllZero,  ///< normalization requested but every raw score was zero
};

/// Scores of every candidate item at a cut, ascending by item id.
struct ScoreTable {
  CutSpec cut;
  PredictorSpec spec;
  std::vector<std::pair<ItemId, double>> scores;
  bool normalized = false;
  ScoreStatus status = ScoreStatus::kOk;

  std::size_t size() const { return scores.size(); }
  /// Throws ContractError for an item that is not a candidate.
  double score_of(ItemId item) const;
  double sum() const;
};

/// k_o(t) for each candidate. Throws EmptyInputError when no item has a link by t.
ScoreTable score_total_popularity(const TemporalIndex& index, const CutSpec& cut);

/// k_o(t) - lambda * k_o(t - T_P), with T_P taken from the cut.
ScoreTable score_pbp(const TemporalIndex& index, const CutSpec& cut, double lambda,
                     PbpForm form = PbpForm::kLaggedDegree);

/// (k_o(t) - lambda * k_o(t - T_P)) * sum_links exp(gamma * (T_link - t)),
/// normalized to unit sum. An all-zero table comes back unnormalized with
/// status kAllZero.
ScoreTable score_proposed(const TemporalIndex& index, const CutSpec& cut, double lambda,
                          double gamma, DecayScope scope = DecayScope::kAllLinks);

/// Dispatches on spec.kind. The spec's past window replaces the cut's.
ScoreTable score(const TemporalIndex& index, const CutSpec& cut, const PredictorSpec& spec);

/// Divides every score by the total. All-zero input is returned unchanged with
/// normalized=false. Negative scores throw ContractError.
ScoreTable normalize_scores(ScoreTable table);

/// Item ids by descending score, ties by ascending id, at most n of them.
std::vector<ItemId> rank_top_n(const std::vector<std::pair<ItemId, double>>& scores,
                               std::size_t n);
std::vector<ItemId> rank_top_n(const ScoreTable& table, std::size_t n);

/// `item_id,score` rows; scores printed with round-trip precision.
void write_scores_csv(std::ostream& out, const ScoreTable& table);
/// Sidecar with cut, predictor parameters and the normalized flag.
std::string scores_sidecar_json(const ScoreTable& table);

}  // namespace trendpred
