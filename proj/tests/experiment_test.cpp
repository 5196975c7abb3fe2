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

#include "trendpred/experiment.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "trendpred/synthgen.hpp"

namespace trendpred {
namespace {

const TemporalIndex& small_index() {
  static const TemporalIndex index = [] {
    SynthModelParams p;
    p.horizon_days = 150;
    p.links_per_day = 30;
    p.new_items_per_day = 2.0;
    p.n_users = 2000;
    p.seed = 11;
    return TemporalIndex::build(generate(p).log);
  }();
  return index;
}

ExperimentPlan small_plan() {
  ExperimentPlan plan;
  plan.n_cuts = 4;
  plan.ns = {5, 10};
  return plan;
}

std::string csv_of(const ExperimentReport& r) {
  std::ostringstream out;
  write_metrics_csv(out, r.rows);
  return out.str();
}

TEST(SampleCutsTest, DeterministicDistinctAndInRange) {
  const auto& index = small_index();
  auto plan = small_plan();
  plan.n_cuts = 10;
  const auto a = sample_cuts(index, plan);
  const auto b = sample_cuts(index, plan);
  ASSERT_EQ(a.size(), 10u);
  std::set<Day> days;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].t, b[i].t);
    EXPECT_GE(a[i].t, index.min_day() + plan.warmup());
    EXPECT_LE(a[i].t, index.max_day() - plan.future_window);
    days.insert(a[i].t);
  }
  EXPECT_EQ(days.size(), 10u);
  plan.seed = 43;
  std::vector<Day> other;
  for (const auto& c : sample_cuts(index, plan)) other.push_back(c.t);
  EXPECT_NE(other, std::vector<Day>(days.begin(), days.end()));
}

TEST(SampleCutsTest, ExhaustsFeasibleRange) {
  const auto& index = small_index();
  auto plan = small_plan();
  const Day feasible = index.max_day() - plan.future_window - (index.min_day() + plan.warmup()) + 1;
  plan.n_cuts = static_cast<std::size_t>(feasible);
  EXPECT_EQ(sample_cuts(index, plan).size(), plan.n_cuts);
  plan.n_cuts += 1;
  try {
    sample_cuts(index, plan);
    FAIL() << "expected RangeError";
  } catch (const RangeError& e) {
    EXPECT_NE(std::string(e.what()).find("only " + std::to_string(feasible)), std::string::npos);
  }
}

TEST(RunGridTest, CellCountsFollowApplicability) {
  auto plan = small_plan();
  plan.n_cuts = 1;
  plan.ns = {5};
  plan.lambda_grid = {0.0, 1.0};
  plan.gamma_grid = {0.0};
  const auto report = run_grid(small_index(), plan);
  ASSERT_TRUE(report.ok());
  std::size_t total = 0, pbp = 0, proposed = 0;
  for (const auto& row : report.rows) {
    total += row.spec.kind == PredictorKind::kTotalPopularity;
    pbp += row.spec.kind == PredictorKind::kPbp;
    proposed += row.spec.kind == PredictorKind::kProposed;
  }
  EXPECT_EQ(total, 1u);
  EXPECT_EQ(pbp, 2u);
  EXPECT_EQ(proposed, 2u);
}

TEST(RunGridTest, ByteIdenticalAcrossRerunsAndWorkers) {
  auto plan = small_plan();
  plan.lambda_grid = {0.5, 0.9};
  plan.gamma_grid = {0.05, 0.1};
  const auto one = run_grid(small_index(), plan);
  plan.workers = 3;
  const auto three = run_grid(small_index(), plan);
  const auto again = run_grid(small_index(), plan);
  EXPECT_EQ(csv_of(one), csv_of(three));
  EXPECT_EQ(csv_of(three), csv_of(again));
  EXPECT_EQ(summary_json(one).dump(), summary_json(three).dump());
}

TEST(RunGridTest, AveragesExcludeUndefinedValues) {
  const auto report = run_grid(small_index(), small_plan());
  for (const auto& avg : report.averages) {
    EXPECT_EQ(avg.n_rows, 4u);
    EXPECT_EQ(avg.q_defined + avg.q_excluded(), avg.n_rows);
    if (avg.spec.kind == PredictorKind::kTotalPopularity && avg.q_n) EXPECT_EQ(*avg.q_n, 0.0);
  }
}

TEST(FinalizeTest, RecomputesFromRows) {
  ExperimentReport report;
  MetricRow row;
  row.spec = canonical(PredictorSpec::proposed(0.9, 0.1, 30));
  row.future_window = 30;
  row.n = 5;
  row.p_n = MetricValue::of(0.2);
  row.q_n = MetricValue::undefined(UndefinedReason::kEmptyNoveltySet);
  row.auc = MetricValue::of(0.5);
  report.rows.push_back(row);
  row.t = 1;
  row.p_n = MetricValue::of(0.6);
  row.q_n = MetricValue::of(1.0);
  report.rows.push_back(row);
  report.finalize();
  ASSERT_EQ(report.averages.size(), 1u);
  EXPECT_DOUBLE_EQ(*report.averages[0].p_n, 0.4);
  EXPECT_EQ(*report.averages[0].q_n, 1.0);
  EXPECT_EQ(report.averages[0].q_excluded(), 1u);
}

TEST(HorizonTest, SingleWindowMatchesGrid) {
  const auto plan = small_plan();
  const auto grid = run_grid(small_index(), plan);
  const auto sweep = horizon_sweep(small_index(), plan, {plan.future_window});
  EXPECT_EQ(csv_of(grid), csv_of(sweep));
}

TEST(HorizonTest, SharedCutsAcrossWindows) {
  auto plan = small_plan();
  const auto report = horizon_sweep(small_index(), plan, {10, 20, 40});
  std::map<Day, std::set<Day>> cuts_by_window;
  for (const auto& row : report.rows) cuts_by_window[row.future_window].insert(row.t);
  ASSERT_EQ(cuts_by_window.size(), 3u);
  EXPECT_EQ(cuts_by_window[10], cuts_by_window[40]);
  for (const auto& cut : report.cuts) EXPECT_LE(cut.t, small_index().max_day() - 40);
  for (const auto& cut : report.cuts) {
    for (const ItemId item : small_index().candidate_items(cut.t)) {
      EXPECT_LE(small_index().future_gain(item, CutSpec{cut.t, 30, 10}),
                small_index().future_gain(item, CutSpec{cut.t, 30, 40}));
    }
  }
}

TEST(CompareTest, IdenticalSelectorsTie) {
  const auto report = run_grid(small_index(), small_plan());
  const auto sel = Selector::parse("proposed,lambda=0.9");
  const auto cmp = compare_predictors(report, sel, sel);
  ASSERT_EQ(cmp.rows.size(), 2u);
  for (const auto& row : cmp.rows) {
    EXPECT_EQ(*row.p_n.delta(), 0.0);
    EXPECT_EQ(*row.auc.win_rate(), 0.5);
    EXPECT_EQ(row.p_n.wins + row.p_n.losses, 0u);
  }
}

TEST(CompareTest, SelectorErrors) {
  auto plan = small_plan();
  plan.lambda_grid = {0.5, 0.9};
  const auto report = run_grid(small_index(), plan);
  EXPECT_THROW(compare_predictors(report, Selector{PredictorKind::kPbp},
                                  Selector::parse("proposed,lambda=0.9")),
               ContractError);
  EXPECT_THROW(compare_predictors(report, Selector::parse("pbp,lambda=0.7"),
                                  Selector::parse("proposed,lambda=0.9")),
               ContractError);
  EXPECT_NO_THROW(compare_predictors(report, Selector::parse("pbp,lambda=0.5"),
                                     Selector::parse("proposed,lambda=0.9")));
  EXPECT_THROW(Selector::parse("proposed,alpha=1"), ContractError);
  EXPECT_THROW(Selector::parse("nope"), ContractError);
}

TEST(MetricsCsvTest, RoundTrip) {
  const auto report = run_grid(small_index(), small_plan());
  const std::string text = csv_of(report);
  std::istringstream in(text);
  const auto rows = read_metrics_csv(in);
  ASSERT_EQ(rows.size(), report.rows.size());
  std::ostringstream again;
  write_metrics_csv(again, rows);
  EXPECT_EQ(again.str(), text);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "t,predictor,lambda,gamma,T_P,T_F,n,p_n,q_n,auc,q_defined,auc_defined");
}

TEST(MetricsCsvTest, RejectsMalformedRows) {
  std::istringstream in("t,predictor\n1,pbp,0.9\n");
  EXPECT_THROW(read_metrics_csv(in), ParseError);
}

TEST(PlanJsonTest, ParsesAndRoundTrips) {
  const auto doc = nlohmann::json::parse(R"({
    "n_cuts": 3, "seed": 7, "T_P_days": 20, "T_F_days": 10,
    "lambda_grid": [0.5], "gamma_grid": [0.2], "ns": [5],
    "predictors": ["pbp", {"kind": "proposed", "gamma": 0.3, "decay_scope": "window"}],
    "novelty_basis": "past-gain", "baseline": "pbp", "challenger": "proposed"
  })");
  const auto plan = ExperimentPlan::from_json(doc);
  EXPECT_EQ(plan.n_cuts, 3u);
  EXPECT_EQ(plan.warmup(), 20);
  EXPECT_EQ(plan.novelty_basis, NoveltyBasis::kPastWindowGain);
  const auto specs = plan.expand();
  ASSERT_EQ(specs.size(), 2u);
  EXPECT_EQ(specs[1].gamma, 0.3);
  EXPECT_EQ(specs[1].decay_scope, DecayScope::kPastWindow);
  const auto back = ExperimentPlan::from_json(nlohmann::json::parse(plan.to_json().dump()));
  EXPECT_EQ(back.to_json(), plan.to_json());
}

TEST(PlanJsonTest, RejectsBadInput) {
  EXPECT_THROW(ExperimentPlan::from_json(nlohmann::json::parse(R"({"n_cutz": 3})")), ContractError);
  EXPECT_THROW(ExperimentPlan::from_json(nlohmann::json::parse(R"({"lambda_grid": [1.5]})"))
                   .validate(),
               ContractError);
  EXPECT_THROW(ExperimentPlan::from_json(nlohmann::json::parse(R"({"ns": []})")).validate(),
               ContractError);
}

}  // namespace
}  // namespace trendpred
