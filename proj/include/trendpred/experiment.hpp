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
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "trendpred/metrics.hpp"
#include "trendpred/predictors.hpp"
#include "trendpred/temporal_index.hpp"

namespace trendpred {

/// A predictor family in a plan. Unset parameters are swept over the plan grids;
/// unset past_window falls back to the plan's.
struct PredictorTemplate {
  PredictorKind kind = PredictorKind::kProposed;
  std::optional<double> lambda;
  std::optional<double> gamma;
  std::optional<Day> past_window;
  DecayScope decay_scope = DecayScope::kAllLinks;
  PbpForm pbp_form = PbpForm::kLaggedDegree;
};

/// Picks one parameterization out of a report. Unset fields match anything.
struct Selector {
  PredictorKind kind = PredictorKind::kProposed;
  std::optional<double> lambda;
  std::optional<double> gamma;
  std::optional<Day> past_window;
  std::optional<Day> future_window;

  /// "kind[,lambda=R][,gamma=R][,tp=D][,tf=D]"
  static Selector parse(const std::string& text);
  std::string describe() const;
};

struct ExperimentPlan {
  std::size_t n_cuts = 10;
  std::uint64_t seed = 42;
  Day past_window = 30;
  Day future_window = 30;
  std::vector<double> lambda_grid{0.9};
  std::vector<double> gamma_grid{0.1};
  std::vector<std::size_t> ns{50, 100, 200};
  std::vector<PredictorTemplate> predictors{
      {PredictorKind::kTotalPopularity}, {PredictorKind::kPbp}, {PredictorKind::kProposed}};
  /// Defaults to past_window.
  std::optional<Day> warmup_days;
  NoveltyBasis novelty_basis = NoveltyBasis::kCumulativeDegree;
  /// Summary comparison; skipped when either is unset.
  std::optional<Selector> baseline = Selector{PredictorKind::kPbp};
  std::optional<Selector> challenger = Selector{PredictorKind::kProposed};
  /// Worker threads for grid cells. Has no effect on output.
  std::size_t workers = 1;

  Day warmup() const { return warmup_days.value_or(past_window); }
  /// Throws ContractError on empty grids, out-of-range parameters or zero counts.
  void validate() const;
  /// Concrete predictor parameterizations, in template order.
  std::vector<PredictorSpec> expand() const;

  /// Missing keys keep their defaults; unknown keys are rejected.
  static ExperimentPlan from_json(const nlohmann::json& doc);
  nlohmann::ordered_json to_json() const;
};

/// Metrics of one (cut, predictor, n) cell.
struct MetricRow {
  Day t = 0;
  PredictorSpec spec;
  Day future_window = 0;
  std::size_t n = 0;
  MetricValue p_n;
  MetricValue q_n;
  MetricValue auc;
};

struct FailedCell {
  Day t = 0;
  PredictorSpec spec;
  Day future_window = 0;
  std::string reason;
};

/// Means over cuts of the defined values of one (predictor, T_F, n) group.
struct AverageRow {
  PredictorSpec spec;
  Day future_window = 0;
  std::size_t n = 0;
  std::size_t n_rows = 0;
  std::optional<double> p_n;
  std::optional<double> q_n;
  std::optional<double> auc;
  std::size_t p_defined = 0;
  std::size_t q_defined = 0;
  std::size_t auc_defined = 0;
  std::size_t q_excluded() const { return n_rows - q_defined; }
  std::size_t auc_excluded() const { return n_rows - auc_defined; }
};

struct ExperimentReport {
  ExperimentPlan plan;
  std::vector<CutSpec> cuts;
  std::vector<MetricRow> rows;
  std::vector<FailedCell> failures;
  std::vector<AverageRow> averages;

  /// Recomputes averages from rows, then checks them against an independent
  /// recomputation; throws Error if they disagree.
  void finalize();
  bool ok() const { return failures.empty(); }
};

/// Canonical predictor parameters: fields the kind ignores are zeroed so
/// that equal parameterizations compare equal.
PredictorSpec canonical(PredictorSpec spec);

/// n_cuts distinct days from [min_day + warmup, max_day - T_F], ascending.
/// Throws RangeError naming the feasible count when the range is too small.
std::vector<CutSpec> sample_cuts(const TemporalIndex& index, const ExperimentPlan& plan);

/// Metrics for a single cut and predictor.
std::vector<MetricRow> evaluate_cut(const TemporalIndex& index, const CutSpec& cut,
                                    const PredictorSpec& spec, const std::vector<std::size_t>& ns,
                                    NoveltyBasis basis = NoveltyBasis::kCumulativeDegree);

ExperimentReport run_grid(const TemporalIndex& index, const ExperimentPlan& plan);

/// One grid per future window over shared cuts, sampled for the longest window.
ExperimentReport horizon_sweep(const TemporalIndex& index, const ExperimentPlan& plan,
                               const std::vector<Day>& future_windows);

struct MetricComparison {
  std::optional<double> baseline;
  std::optional<double> challenger;
  std::size_t wins = 0;    ///< cuts where the challenger is strictly better
  std::size_t ties = 0;
  std::size_t losses = 0;
  std::optional<double> delta() const;
  /// (wins + ties / 2) / compared cuts.
  std::optional<double> win_rate() const;
};

struct ComparisonRow {
  std::size_t n = 0;
  MetricComparison p_n;
  MetricComparison q_n;
  MetricComparison auc;
};

struct Comparison {
  PredictorSpec baseline;
  PredictorSpec challenger;
  Day future_window = 0;
  std::vector<ComparisonRow> rows;
};

/// Side-by-side averages and per-cut win counts. Each selector must match
/// exactly one parameterization in the report, otherwise ContractError.
Comparison compare_predictors(const ExperimentReport& report, const Selector& baseline,
                              const Selector& challenger);

/// `t,predictor,lambda,gamma,T_P,T_F,n,p_n,q_n,auc,q_defined,auc_defined`
void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows);
std::vector<MetricRow> read_metrics_csv(std::istream& in);

nlohmann::ordered_json summary_json(const ExperimentReport& report);
nlohmann::ordered_json comparison_json(const Comparison& comparison);
/// Table with P_n / Q_n / AUC rows and baseline / challenger columns per n.
void write_comparison_table(std::ostream& out, const Comparison& comparison);

}  // namespace trendpred
