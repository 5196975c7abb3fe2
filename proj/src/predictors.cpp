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

#include "trendpred/predictors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <json.hpp>

#include "trendpred/format.hpp"

namespace trendpred {

std::string to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::kTotalPopularity:
      return "total";
    case PredictorKind::kPbp:
      return "pbp";
    case PredictorKind::kProposed:
      return "proposed";
  }
  return "unknown";
}

PredictorKind parse_predictor_kind(const std::string& name) {
  if (name == "total") return PredictorKind::kTotalPopularity;
  if (name == "pbp") return PredictorKind::kPbp;
  if (name == "proposed") return PredictorKind::kProposed;
  throw ContractError("unknown predictor '" + name + "' (expected total, pbp or proposed)");
}

void PredictorSpec::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ContractError("lambda must lie in [0,1], got " + format_double(lambda));
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ContractError("gamma must be a finite nonnegative number, got " + format_double(gamma));
  }
  if (past_window < 1) throw ContractError("past window must be at least 1 day");
}

double ScoreTable::score_of(ItemId item) const {
  const auto it = std::lower_bound(scores.begin(), scores.end(), item,
                                   [](const auto& entry, ItemId id) { return entry.first < id; });
  if (it == scores.end() || it->first != item) {
    throw ContractError("item " + std::to_string(item) + " is not a candidate of this table");
  }
  return it->second;
}

double ScoreTable::sum() const {
  double total = 0.0;
  for (const auto& [item, value] : scores) total += value;
  return total;
}

namespace {

template <typename Fn>
ScoreTable score_candidates(const TemporalIndex& index, const CutSpec& cut,
                            const PredictorSpec& spec, Fn&& raw_score) {
  index.validate(cut);
  spec.validate();
  const auto candidates = index.candidate_items(cut.t);
  if (candidates.empty()) {
    throw EmptyInputError("no item has a link on or before day " + std::to_string(cut.t));
  }
  ScoreTable table;
  table.cut = cut;
  table.spec = spec;
  table.scores.reserve(candidates.size());
  for (const ItemId item : candidates) table.scores.emplace_back(item, raw_score(item));
  return table;
}

double gain_factor(const TemporalIndex& index, ItemId item, const CutSpec& cut, double lambda,
                   PbpForm form) {
  const auto now = static_cast<double>(index.degree_at(item, cut.t));
  const auto lagged = static_cast<double>(index.degree_at(item, cut.t - cut.past_window));
  if (form == PbpForm::kWindowGain) return now - lambda * (now - lagged);
  return now - lambda * lagged;
}

}  // namespace

ScoreTable score_total_popularity(const TemporalIndex& index, const CutSpec& cut) {
  PredictorSpec spec = PredictorSpec::total();
  spec.past_window = cut.past_window;
  return score_candidates(index, cut, spec, [&](ItemId item) {
    return static_cast<double>(index.degree_at(item, cut.t));
  });
}

ScoreTable score_pbp(const TemporalIndex& index, const CutSpec& cut, double lambda,
                     PbpForm form) {
  PredictorSpec spec = PredictorSpec::pbp(lambda, cut.past_window);
  spec.pbp_form = form;
  return score_candidates(index, cut, spec, [&](ItemId item) {
    return gain_factor(index, item, cut, lambda, form);
  });
}

ScoreTable score_proposed(const TemporalIndex& index, const CutSpec& cut, double lambda,
                          double gamma, DecayScope scope) {
  PredictorSpec spec = PredictorSpec::proposed(lambda, gamma, cut.past_window);
  spec.decay_scope = scope;
  auto table = score_candidates(index, cut, spec, [&](ItemId item) {
    const double gain = gain_factor(index, item, cut, lambda, PbpForm::kLaggedDegree);
    if (gain == 0.0) return 0.0;
    return gain * index.decay_weight_sum(item, cut.t, gamma, scope, cut.past_window);
  });
  return normalize_scores(std::move(table));
}

ScoreTable score(const TemporalIndex& index, const CutSpec& cut, const PredictorSpec& spec) {
  CutSpec effective = cut;
  effective.past_window = spec.past_window;
  switch (spec.kind) {
    case PredictorKind::kTotalPopularity:
      return score_total_popularity(index, effective);
    case PredictorKind::kPbp:
      return score_pbp(index, effective, spec.lambda, spec.pbp_form);
    case PredictorKind::kProposed:
      return score_proposed(index, effective, spec.lambda, spec.gamma, spec.decay_scope);
  }
  throw ContractError("unknown predictor kind");
}

ScoreTable normalize_scores(ScoreTable table) {
  double total = 0.0;
  for (const auto& [item, value] : table.scores) {
    if (value < 0.0 || std::isnan(value)) {
      throw ContractError("raw score of item " + std::to_string(item) + " is negative (" +
                          format_double(value) + ")");
    }
    total += value;
  }
  if (total == 0.0) {
    table.normalized = false;
    table.status = ScoreStatus::kAllZero;
    return table;
  }
  for (auto& entry : table.scores) entry.second /= total;
  table.normalized = true;
  table.status = ScoreStatus::kOk;
  return table;
}

std::vector<ItemId> rank_top_n(const std::vector<std::pair<ItemId, double>>& scores,
                               std::size_t n) {
  std::vector<std::pair<ItemId, double>> order(scores);
  const auto better = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  const std::size_t k = std::min(n, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    better);
  std::vector<ItemId> ranked;
  ranked.reserve(k);
  for (std::size_t i = 0; i < k; ++i) ranked.push_back(order[i].first);
  return ranked;
}

std::vector<ItemId> rank_top_n(const ScoreTable& table, std::size_t n) {
  return rank_top_n(table.scores, n);
}

void write_scores_csv(std::ostream& out, const ScoreTable& table) {
  out << "item_id,score\n";
  for (const auto& [item, value] : table.scores) out << item << ',' << format_double(value) << '\n';
}

std::string scores_sidecar_json(const ScoreTable& table) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["software"] = std::string("trendpred ") + kVersion;
  doc["cut"] = {{"t", table.cut.t},
                {"T_P", table.cut.past_window},
                {"T_F", table.cut.future_window}};
  nlohmann::ordered_json spec;
  spec["predictor"] = to_string(table.spec.kind);
  spec["lambda"] = table.spec.lambda;
  spec["gamma"] = table.spec.gamma;
  spec["T_P"] = table.spec.past_window;
  spec["decay_scope"] = table.spec.decay_scope == DecayScope::kAllLinks ? "all" : "window";
  spec["pbp_form"] = table.spec.pbp_form == PbpForm::kLaggedDegree ? "lagged" : "window-gain";
  doc["spec"] = spec;
  doc["normalized"] = table.normalized;
  doc["status"] = table.status == ScoreStatus::kOk ? "ok" : "all-zero";
  doc["n_candidates"] = table.scores.size();
  return doc.dump(2) + "\n";
}

}  // namespace trendpred
