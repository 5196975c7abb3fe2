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

// Acceptance runner: one PASS/FAIL line per criterion. Exit status is nonzero
// if any criterion fails. Criterion 6 needs a local MovieLens 100k `u.data`
// file named by TRENDPRED_MOVIELENS and is reported as SKIP without it.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "trendpred/experiment.hpp"
#include "trendpred/metrics.hpp"
#include "trendpred/predictors.hpp"
#include "trendpred/synthgen.hpp"
#include "trendpred/temporal_index.hpp"

namespace trendpred {
namespace {

enum class Verdict { kPass, kFail, kSkip };

struct Outcome {
  Verdict verdict = Verdict::kPass;
  std::string detail;
};

Outcome fail(std::string why) { return {Verdict::kFail, std::move(why)}; }

using Clock = std::chrono::steady_clock;

// ---------------------------------------------------------------------------

Outcome scores_match_oracle() {
  constexpr double kRel = 1e-9;
  Random rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto log = oracle::random_log(rng, 50, 12, 10, 40);
    const auto index = TemporalIndex::build(log);
    const Day t = index.min_day() + static_cast<Day>(rng.below(index.max_day() - index.min_day() + 1));
    const Day tp = 1 + static_cast<Day>(rng.below(15));
    const double lambda = rng.uniform();
    const double gamma = 2.0 * rng.uniform();
    const CutSpec cut{t, tp, 1};

    const auto pbp = score_pbp(index, cut, lambda);
    const auto pbp_expect = oracle::pbp_scores(log, t, tp, lambda);
    if (pbp.size() != pbp_expect.size()) return fail("pbp candidate count differs");
    for (const auto& [item, v] : pbp.scores) {
      const double e = pbp_expect.at(item);
      const double rel = std::abs(v - e) / std::max(std::abs(e), 1e-300);
      if (std::abs(v - e) > kRel * std::abs(e) && v != e) return fail("pbp item " + std::to_string(item));
      if (e != 0.0) worst = std::max(worst, rel);
    }

    const auto proposed = score_proposed(index, cut, lambda, gamma);
    const auto raw = oracle::proposed_raw(log, t, tp, lambda, gamma);
    double total = 0.0;
    for (const auto& [item, v] : raw) total += v;
    for (const auto& [item, v] : proposed.scores) {
      const double e = total > 0.0 ? raw.at(item) / total : raw.at(item);
      if (std::abs(v - e) > kRel * std::abs(e) && v != e) {
        return fail("proposed item " + std::to_string(item) + " trial " + std::to_string(trial));
      }
      if (e != 0.0) worst = std::max(worst, std::abs(v - e) / std::abs(e));
    }
  }
  std::ostringstream d;
  d << "200 logs, max relative error " << worst << " (tolerance 1e-9)";
  return {Verdict::kPass, d.str()};
}

Outcome metrics_match_oracle() {
  Random rng(2002);
  const CutSpec cut{10, 5, 5};
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t items = 1 + rng.below(30);
    std::map<ItemId, double> scores, past, gain_scores;
    std::vector<std::pair<ItemId, std::int64_t>> gains;
    for (ItemId i = 0; i < items; ++i) {
      const auto g = static_cast<std::int64_t>(rng.below(8));
      gains.emplace_back(i, g);
      gain_scores[i] = static_cast<double>(g);
      scores[i] = static_cast<double>(rng.below(10)) / 3.0;
      past[i] = static_cast<double>(rng.below(12));
    }
    ScoreTable table;
    table.cut = cut;
    table.scores.assign(scores.begin(), scores.end());
    ScoreTable basis;
    basis.cut = cut;
    basis.scores.assign(past.begin(), past.end());
    const GroundTruth truth{cut, gains};
    const std::size_t n = 1 + rng.below(35);
    const std::size_t k = std::min(n, items);
    const auto pred_top = oracle::ranking(scores, k);
    const auto real_top = oracle::ranking(gain_scores, k);
    const auto past_top = oracle::ranking(past, k);
    const auto triple = evaluate(table, truth, basis, {n}).front();

    if (*triple.p_n.value != oracle::precision(pred_top, real_top, k)) return fail("P_n differs");
    const double q = oracle::novelty(pred_top, real_top, past_top);
    if ((q < 0) != !triple.q_n.defined()) return fail("Q_n definedness differs");
    if (q >= 0 && *triple.q_n.value != q) return fail("Q_n differs");
    const double a = oracle::auc(scores, real_top);
    if ((a < 0) != !triple.auc.defined()) return fail("AUC definedness differs");
    if (a >= 0) {
      worst = std::max(worst, std::abs(*triple.auc.value - a));
      if (std::abs(*triple.auc.value - a) > 1e-12) return fail("AUC differs");
    }
  }
  std::ostringstream d;
  d << "500 instances, P_n/Q_n exact, max AUC error " << worst << " (tolerance 1e-12)";
  return {Verdict::kPass, d.str()};
}

Outcome reduction_identities() {
  Random rng(3003);
  for (int trial = 0; trial < 100; ++trial) {
    const auto log = oracle::random_log(rng, 60, 15, 12, 40);
    const auto index = TemporalIndex::build(log);
    const Day t = index.min_day() + static_cast<Day>(rng.below(index.max_day() - index.min_day() + 1));
    const CutSpec cut{t, 1 + static_cast<Day>(rng.below(15)), 1};
    const auto total = score_total_popularity(index, cut);
    const auto proposed = score_proposed(index, cut, 0.0, 0.0);
    const auto pbp = score_pbp(index, cut, 1.0);
    std::map<ItemId, double> past_gain;
    for (const ItemId item : index.candidate_items(t)) {
      past_gain[item] = static_cast<double>(oracle::window_count(log, item, t - cut.past_window, t));
    }
    for (std::size_t n = 1; n <= total.size(); ++n) {
      if (rank_top_n(proposed, n) != rank_top_n(total, n)) {
        return fail("proposed(0,0) != total at trial " + std::to_string(trial) + " n " + std::to_string(n));
      }
      if (rank_top_n(pbp, n) != oracle::ranking(past_gain, n)) {
        return fail("pbp(1) != past gain at trial " + std::to_string(trial) + " n " + std::to_string(n));
      }
    }
  }
  return {Verdict::kPass, "100 logs, every n"};
}

Outcome perfect_auc() {
  const CutSpec cut{5, 5, 5};
  std::vector<std::pair<ItemId, std::int64_t>> gains;
  ScoreTable perfect, negated;
  perfect.cut = negated.cut = cut;
  for (ItemId i = 0; i < 40; ++i) {
    const auto g = static_cast<std::int64_t>((i * 17) % 40);
    gains.emplace_back(i, g);
    perfect.scores.emplace_back(i, static_cast<double>(g));
    negated.scores.emplace_back(i, -static_cast<double>(g));
  }
  const GroundTruth truth{cut, gains};
  for (std::size_t n = 1; n < 40; ++n) {
    if (*auc(perfect, truth, n).value != 1.0) return fail("perfect AUC != 1 at n " + std::to_string(n));
    if (*auc(negated, truth, n).value != 0.0) return fail("negated AUC != 0 at n " + std::to_string(n));
  }
  return {Verdict::kPass, "40 distinct gains, n = 1..39, exact"};
}

Outcome synthetic_direction() {
  int wins = 0;
  std::ostringstream detail;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SynthModelParams params;
    params.aging_rate = 0.05;
    params.fitness = FitnessKind::kUniform;
    params.horizon_days = 365;
    params.links_per_day = 100;
    params.seed = seed;
    const auto index = TemporalIndex::build(generate(params).log);
    ExperimentPlan plan;
    plan.n_cuts = 10;
    plan.seed = seed;
    plan.past_window = 30;
    plan.future_window = 30;
    plan.ns = {50};
    plan.predictors = {{PredictorKind::kPbp, 0.9}, {PredictorKind::kProposed, 0.9, 0.1}};
    const auto report = run_grid(index, plan);
    const auto cmp = compare_predictors(report, Selector{PredictorKind::kPbp},
                                        Selector{PredictorKind::kProposed});
    const auto& q = cmp.rows.front().q_n;
    if (q.baseline && q.challenger && *q.challenger > *q.baseline) ++wins;
  }
  // One-sided sign test: P(X >= 15 | Bin(20, 1/2)) = 0.0207.
  detail << "proposed beats pbp on mean Q_50 in " << wins << "/20 seeds (need >= 15)";
  return {wins >= 15 ? Verdict::kPass : Verdict::kFail, detail.str()};
}

Outcome movielens_direction() {
  const char* path = std::getenv("TRENDPRED_MOVIELENS");
  if (path == nullptr || *path == '\0') {
    return {Verdict::kSkip, "TRENDPRED_MOVIELENS not set; no MovieLens data available"};
  }
  std::ifstream in(path);
  if (!in) return {Verdict::kSkip, std::string("cannot read ") + path};
  InputFormat format;
  format.delimiter = '\t';
  format.time_unit = TimeUnit::kEpochSeconds;
  format.user_column = 0;
  format.item_column = 1;
  format.rating_column = 2;
  format.time_column = 3;
  PreprocessOptions options;
  options.min_rating_exclusive = 2;
  options.min_user_events = 20;
  const auto index = TemporalIndex::build(preprocess(parse_events(in, format), options));
  ExperimentPlan plan;
  plan.ns = {100};
  plan.predictors = {{PredictorKind::kPbp, 0.9}, {PredictorKind::kProposed, 0.9, 0.1}};
  const auto report = run_grid(index, plan);
  const auto row = compare_predictors(report, Selector{PredictorKind::kPbp},
                                      Selector{PredictorKind::kProposed})
                       .rows.front();
  const auto geq = [](const MetricComparison& m) {
    return m.baseline && m.challenger && *m.challenger >= *m.baseline;
  };
  std::ostringstream d;
  d << "P_100 " << row.p_n.challenger.value_or(-1) << " vs " << row.p_n.baseline.value_or(-1)
    << ", Q_100 " << row.q_n.challenger.value_or(-1) << " vs " << row.q_n.baseline.value_or(-1);
  return {geq(row.p_n) && geq(row.q_n) ? Verdict::kPass : Verdict::kFail, d.str()};
}

Outcome determinism() {
  SynthModelParams params;
  params.horizon_days = 200;
  params.links_per_day = 60;
  params.seed = 77;
  const auto index = TemporalIndex::build(generate(params).log);
  ExperimentPlan plan;
  plan.lambda_grid = {0.5, 0.9};
  plan.gamma_grid = {0.05, 0.1, 0.2};
  std::string first_csv, first_json;
  for (const std::size_t workers : {1, 4, 1, 3}) {
    plan.workers = workers;
    const auto report = run_grid(index, plan);
    std::ostringstream csv;
    write_metrics_csv(csv, report.rows);
    const std::string json = summary_json(report).dump(2);
    if (first_csv.empty()) {
      first_csv = csv.str();
      first_json = json;
    } else if (csv.str() != first_csv || json != first_json) {
      return fail("output differs with " + std::to_string(workers) + " workers");
    }
  }
  return {Verdict::kPass, "4 runs (1, 4, 1, 3 workers), byte-identical CSV and JSON"};
}

Outcome invariants() {
  Random rng(8008);
  for (int trial = 0; trial < 200; ++trial) {
    const auto log = oracle::random_log(rng, 50, 10, 10, 30);
    const auto index = TemporalIndex::build(log);
    for (const ItemId item : index.items()) {
      for (Day t = index.min_day(); t <= index.max_day(); ++t) {
        if (index.degree_at(item, t - 1) > index.degree_at(item, t)) return fail("degree not monotone");
        for (Day tf = 1; tf <= 10; ++tf) {
          if (index.degree_at(item, t) + index.future_gain(item, CutSpec{t, 1, tf}) !=
              index.degree_at(item, t + tf)) {
            return fail("window decomposition broken");
          }
        }
      }
    }
    const Day t = index.min_day() + static_cast<Day>(rng.below(index.max_day() - index.min_day() + 1));
    const CutSpec cut{t, 1 + static_cast<Day>(rng.below(10)), 1 + static_cast<Day>(rng.below(10))};
    const double lambda = rng.uniform();
    const double gamma = rng.uniform();
    const auto truth = make_ground_truth(index, cut);
    const auto basis = novelty_basis_table(index, cut, NoveltyBasis::kCumulativeDegree);
    for (const auto& spec : {PredictorSpec::total(), PredictorSpec::pbp(lambda, cut.past_window),
                             PredictorSpec::proposed(lambda, gamma, cut.past_window)}) {
      const auto table = score(index, cut, spec);
      for (const auto& [item, v] : table.scores) {
        if (!(v >= 0.0)) return fail("negative score");
      }
      if (table.normalized && std::abs(table.sum() - 1.0) > 1e-9) return fail("sum != 1");
      if (spec.kind == PredictorKind::kProposed && !table.normalized &&
          table.status != ScoreStatus::kAllZero) {
        return fail("proposed not normalized");
      }
      for (const auto& m : evaluate(table, truth, basis, {1, 3, 10, 50})) {
        for (const auto* v : {&m.p_n, &m.q_n, &m.auc}) {
          if (v->defined() && (*v->value < 0.0 || *v->value > 1.0)) return fail("metric outside [0,1]");
        }
      }
    }
  }
  return {Verdict::kPass, "200 logs: monotone degree, decomposition, scores >= 0, sum 1 +- 1e-9, metrics in [0,1]"};
}

}  // namespace
}  // namespace trendpred

int main() {
  using namespace trendpred;
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "score oracle equivalence", 5, scores_match_oracle},
      {2, "metric oracle equivalence", 5, metrics_match_oracle},
      {3, "reduction identities", 60, reduction_identities},
      {4, "perfect-predictor AUC", 60, perfect_auc},
      {5, "synthetic directional check", 120, synthetic_direction},
      {6, "MovieLens directional check", 300, movielens_direction},
      {7, "determinism across workers", 120, determinism},
      {8, "invariant suite", 120, invariants},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = fail(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (outcome.verdict == Verdict::kPass && seconds > c.budget_seconds) {
      outcome = fail(outcome.detail + "; too slow");
    }
    const char* tag = outcome.verdict == Verdict::kPass ? "PASS"
                      : outcome.verdict == Verdict::kSkip ? "SKIP"
                                                          : "FAIL";
    failures += outcome.verdict == Verdict::kFail;
    std::printf("criterion %d [%s] %s: %s (%.2fs, budget %.0fs)\n", c.id, tag, c.name,
                outcome.detail.c_str(), seconds, c.budget_seconds);
  }
  return failures == 0 ? 0 : 1;
}
