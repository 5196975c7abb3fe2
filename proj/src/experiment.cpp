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

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string_view>
#include <thread>
#include <tuple>

#include "trendpred/format.hpp"
#include "trendpred/random.hpp"

namespace trendpred {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

bool uses_lambda(PredictorKind kind) { return kind != PredictorKind::kTotalPopularity; }
bool uses_gamma(PredictorKind kind) { return kind == PredictorKind::kProposed; }

// Identity of an averaging group.
using GroupKey = std::tuple<int, double, double, Day, int, int, Day, std::size_t>;

GroupKey group_key(const PredictorSpec& s, Day future_window, std::size_t n) {
  const PredictorSpec c = canonical(s);
  return {static_cast<int>(c.kind), c.lambda, c.gamma, c.past_window,
          static_cast<int>(c.decay_scope), static_cast<int>(c.pbp_form), future_window, n};
}

std::string decay_scope_name(DecayScope scope) {
  return scope == DecayScope::kAllLinks ? "all" : "window";
}

DecayScope parse_decay_scope(const std::string& name) {
  if (name == "all") return DecayScope::kAllLinks;
  if (name == "window") return DecayScope::kPastWindow;
  throw ContractError("unknown decay_scope '" + name + "' (expected all or window)");
}

std::string pbp_form_name(PbpForm form) {
  return form == PbpForm::kLaggedDegree ? "lagged" : "window-gain";
}

PbpForm parse_pbp_form(const std::string& name) {
  if (name == "lagged") return PbpForm::kLaggedDegree;
  if (name == "window-gain") return PbpForm::kWindowGain;
  throw ContractError("unknown pbp_form '" + name + "' (expected lagged or window-gain)");
}

std::string novelty_basis_name(NoveltyBasis basis) {
  return basis == NoveltyBasis::kCumulativeDegree ? "degree" : "past-gain";
}

NoveltyBasis parse_novelty_basis(const std::string& name) {
  if (name == "degree") return NoveltyBasis::kCumulativeDegree;
  if (name == "past-gain") return NoveltyBasis::kPastWindowGain;
  throw ContractError("unknown novelty_basis '" + name + "' (expected degree or past-gain)");
}

void check_keys(const Json& doc, std::initializer_list<std::string_view> allowed,
                const char* what) {
  for (const auto& [key, value] : doc.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ContractError(std::string("unknown key '") + key + "' in " + what);
    }
  }
}

PredictorTemplate template_from_json(const Json& doc) {
  PredictorTemplate tpl;
  if (doc.is_string()) {
    tpl.kind = parse_predictor_kind(doc.get<std::string>());
    return tpl;
  }
  if (!doc.is_object()) throw ContractError("predictor entry must be a string or an object");
  check_keys(doc, {"kind", "lambda", "gamma", "T_P_days", "decay_scope", "pbp_form"},
             "predictor template");
  tpl.kind = parse_predictor_kind(doc.at("kind").get<std::string>());
  if (doc.contains("lambda")) tpl.lambda = doc["lambda"].get<double>();
  if (doc.contains("gamma")) tpl.gamma = doc["gamma"].get<double>();
  if (doc.contains("T_P_days")) tpl.past_window = doc["T_P_days"].get<Day>();
  if (doc.contains("decay_scope")) tpl.decay_scope = parse_decay_scope(doc["decay_scope"]);
  if (doc.contains("pbp_form")) tpl.pbp_form = parse_pbp_form(doc["pbp_form"]);
  return tpl;
}

OrderedJson optional_json(const std::optional<double>& v) {
  return v ? OrderedJson(*v) : OrderedJson(nullptr);
}

OrderedJson spec_json(const PredictorSpec& spec) {
  OrderedJson out;
  out["predictor"] = to_string(spec.kind);
  out["lambda"] = uses_lambda(spec.kind) ? OrderedJson(spec.lambda) : OrderedJson(nullptr);
  out["gamma"] = uses_gamma(spec.kind) ? OrderedJson(spec.gamma) : OrderedJson(nullptr);
  out["T_P"] = spec.past_window;
  if (spec.kind == PredictorKind::kProposed) out["decay_scope"] = decay_scope_name(spec.decay_scope);
  if (spec.kind == PredictorKind::kPbp) out["pbp_form"] = pbp_form_name(spec.pbp_form);
  return out;
}

std::string metric_text(const MetricValue& v) { return v ? format_double(*v.value) : ""; }

struct CutContext {
  CutSpec cut;
  GroundTruth truth;
  ScoreTable basis;
};

struct CellResult {
  std::vector<MetricRow> rows;
  std::optional<std::string> failure;
};

template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

// Runs every (cut, predictor) cell for one future window, appending to report.
void run_cells(const TemporalIndex& index, const ExperimentPlan& plan,
               const std::vector<CutSpec>& cuts, ExperimentReport& report) {
  const auto specs = plan.expand();
  std::vector<std::optional<CutContext>> contexts(cuts.size());
  std::vector<std::string> context_errors(cuts.size());
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    try {
      contexts[c] = CutContext{cuts[c], make_ground_truth(index, cuts[c]),
                               novelty_basis_table(index, cuts[c], plan.novelty_basis)};
    } catch (const Error& e) {
      context_errors[c] = e.what();
    }
  }

  std::vector<CellResult> results(cuts.size() * specs.size());
  parallel_for(results.size(), plan.workers, [&](std::size_t job) {
    const std::size_t c = job / specs.size();
    const PredictorSpec& spec = specs[job % specs.size()];
    CellResult& result = results[job];
    if (!contexts[c]) {
      result.failure = context_errors[c];
      return;
    }
    try {
      const CutContext& ctx = *contexts[c];
      CutSpec cut = ctx.cut;
      cut.past_window = spec.past_window;
      const ScoreTable table = score(index, cut, spec);
      for (const auto& triple : evaluate(table, ctx.truth, ctx.basis, plan.ns)) {
        result.rows.push_back(MetricRow{ctx.cut.t, canonical(spec), ctx.cut.future_window,
                                        triple.n, triple.p_n, triple.q_n, triple.auc});
      }
    } catch (const Error& e) {
      result.rows.clear();
      result.failure = e.what();
    }
  });

  for (std::size_t job = 0; job < results.size(); ++job) {
    auto& result = results[job];
    if (result.failure) {
      report.failures.push_back(FailedCell{cuts[job / specs.size()].t,
                                           canonical(specs[job % specs.size()]),
                                           cuts[job / specs.size()].future_window,
                                           *result.failure});
      continue;
    }
    std::move(result.rows.begin(), result.rows.end(), std::back_inserter(report.rows));
  }
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line_no, const char* what) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ParseError(line_no, std::string("bad ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

MetricValue parse_metric(std::string_view text, std::size_t line_no, const char* what,
                         UndefinedReason reason_if_empty) {
  if (text.empty()) return MetricValue::undefined(reason_if_empty);
  return MetricValue::of(parse_number<double>(text, line_no, what));
}

std::optional<double> mean(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

bool matches(const Selector& sel, const PredictorSpec& spec, Day future_window) {
  constexpr double kTol = 1e-12;
  if (sel.kind != spec.kind) return false;
  if (sel.lambda && std::abs(*sel.lambda - spec.lambda) > kTol) return false;
  if (sel.gamma && std::abs(*sel.gamma - spec.gamma) > kTol) return false;
  if (sel.past_window && *sel.past_window != spec.past_window) return false;
  if (sel.future_window && *sel.future_window != future_window) return false;
  return true;
}

OrderedJson comparison_metric_json(const MetricComparison& m) {
  OrderedJson out;
  out["baseline"] = optional_json(m.baseline);
  out["challenger"] = optional_json(m.challenger);
  out["delta"] = optional_json(m.delta());
  out["wins"] = m.wins;
  out["ties"] = m.ties;
  out["losses"] = m.losses;
  out["win_rate"] = optional_json(m.win_rate());
  return out;
}

}  // namespace

PredictorSpec canonical(PredictorSpec spec) {
  if (!uses_lambda(spec.kind)) spec.lambda = 0.0;
  if (!uses_gamma(spec.kind)) {
    spec.gamma = 0.0;
    spec.decay_scope = DecayScope::kAllLinks;
  }
  if (spec.kind != PredictorKind::kPbp) spec.pbp_form = PbpForm::kLaggedDegree;
  return spec;
}

Selector Selector::parse(const std::string& text) {
  Selector sel;
  std::istringstream in(text);
  std::string part;
  bool first = true;
  while (std::getline(in, part, ',')) {
    if (first) {
      sel.kind = parse_predictor_kind(part);
      first = false;
      continue;
    }
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ContractError("selector field '" + part + "' lacks '='");
    const std::string key = part.substr(0, eq);
    const std::string value = part.substr(eq + 1);
    try {
      if (key == "lambda") {
        sel.lambda = std::stod(value);
      } else if (key == "gamma") {
        sel.gamma = std::stod(value);
      } else if (key == "tp") {
        sel.past_window = std::stoll(value);
      } else if (key == "tf") {
        sel.future_window = std::stoll(value);
      } else {
        throw ContractError("unknown selector field '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw ContractError("bad selector value '" + value + "' for " + key);
    }
  }
  if (first) throw ContractError("empty predictor selector");
  return sel;
}

std::string Selector::describe() const {
  std::string out = to_string(kind);
  if (lambda) out += ",lambda=" + format_double(*lambda);
  if (gamma) out += ",gamma=" + format_double(*gamma);
  if (past_window) out += ",tp=" + std::to_string(*past_window);
  if (future_window) out += ",tf=" + std::to_string(*future_window);
  return out;
}

void ExperimentPlan::validate() const {
  if (n_cuts == 0) throw ContractError("n_cuts must be at least 1");
  if (past_window < 1 || future_window < 1) throw ContractError("windows must be at least 1 day");
  if (lambda_grid.empty() || gamma_grid.empty()) throw ContractError("parameter grids must be nonempty");
  if (ns.empty()) throw ContractError("ns must be nonempty");
  if (std::find(ns.begin(), ns.end(), 0) != ns.end()) throw ContractError("every n must be positive");
  if (predictors.empty()) throw ContractError("plan lists no predictors");
  if (warmup_days && *warmup_days < 0) throw ContractError("warmup_days must be nonnegative");
  if (workers == 0) throw ContractError("workers must be at least 1");
  for (const auto& spec : expand()) spec.validate();
}

std::vector<PredictorSpec> ExperimentPlan::expand() const {
  std::vector<PredictorSpec> specs;
  for (const auto& tpl : predictors) {
    const Day tp = tpl.past_window.value_or(past_window);
    const std::vector<double> lambdas =
        tpl.lambda ? std::vector<double>{*tpl.lambda} : lambda_grid;
    const std::vector<double> gammas = tpl.gamma ? std::vector<double>{*tpl.gamma} : gamma_grid;
    switch (tpl.kind) {
      case PredictorKind::kTotalPopularity:
        specs.push_back(canonical(PredictorSpec{tpl.kind, 0.0, 0.0, tp}));
        break;
      case PredictorKind::kPbp:
        for (const double l : lambdas) {
          specs.push_back(
              canonical(PredictorSpec{tpl.kind, l, 0.0, tp, DecayScope::kAllLinks, tpl.pbp_form}));
        }
        break;
      case PredictorKind::kProposed:
        for (const double l : lambdas) {
          for (const double g : gammas) {
            specs.push_back(PredictorSpec{tpl.kind, l, g, tp, tpl.decay_scope});
          }
        }
        break;
    }
  }
  return specs;
}

ExperimentPlan ExperimentPlan::from_json(const Json& doc) {
  if (!doc.is_object()) throw ContractError("plan must be a JSON object");
  check_keys(doc,
             {"n_cuts", "seed", "T_P_days", "T_F_days", "lambda_grid", "gamma_grid", "ns",
              "predictors", "warmup_days", "novelty_basis", "baseline", "challenger", "workers"},
             "plan");
  ExperimentPlan plan;
  try {
    if (doc.contains("n_cuts")) plan.n_cuts = doc["n_cuts"].get<std::size_t>();
    if (doc.contains("seed")) plan.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("T_P_days")) plan.past_window = doc["T_P_days"].get<Day>();
    if (doc.contains("T_F_days")) plan.future_window = doc["T_F_days"].get<Day>();
    if (doc.contains("lambda_grid")) plan.lambda_grid = doc["lambda_grid"].get<std::vector<double>>();
    if (doc.contains("gamma_grid")) plan.gamma_grid = doc["gamma_grid"].get<std::vector<double>>();
    if (doc.contains("ns")) plan.ns = doc["ns"].get<std::vector<std::size_t>>();
    if (doc.contains("predictors")) {
      plan.predictors.clear();
      for (const auto& entry : doc["predictors"]) plan.predictors.push_back(template_from_json(entry));
    }
    if (doc.contains("warmup_days")) plan.warmup_days = doc["warmup_days"].get<Day>();
    if (doc.contains("novelty_basis")) plan.novelty_basis = parse_novelty_basis(doc["novelty_basis"]);
    if (doc.contains("baseline")) {
      plan.baseline = doc["baseline"].is_null()
                          ? std::nullopt
                          : std::optional(Selector::parse(doc["baseline"].get<std::string>()));
    }
    if (doc.contains("challenger")) {
      plan.challenger = doc["challenger"].is_null()
                            ? std::nullopt
                            : std::optional(Selector::parse(doc["challenger"].get<std::string>()));
    }
    if (doc.contains("workers")) plan.workers = doc["workers"].get<std::size_t>();
  } catch (const Json::exception& e) {
    throw ContractError(std::string("invalid plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

OrderedJson ExperimentPlan::to_json() const {
  OrderedJson doc;
  doc["n_cuts"] = n_cuts;
  doc["seed"] = seed;
  doc["T_P_days"] = past_window;
  doc["T_F_days"] = future_window;
  doc["lambda_grid"] = lambda_grid;
  doc["gamma_grid"] = gamma_grid;
  doc["ns"] = ns;
  OrderedJson templates = OrderedJson::array();
  for (const auto& tpl : predictors) {
    OrderedJson t;
    t["kind"] = to_string(tpl.kind);
    if (tpl.lambda) t["lambda"] = *tpl.lambda;
    if (tpl.gamma) t["gamma"] = *tpl.gamma;
    if (tpl.past_window) t["T_P_days"] = *tpl.past_window;
    if (tpl.kind == PredictorKind::kProposed) t["decay_scope"] = decay_scope_name(tpl.decay_scope);
    if (tpl.kind == PredictorKind::kPbp) t["pbp_form"] = pbp_form_name(tpl.pbp_form);
    templates.push_back(t);
  }
  doc["predictors"] = templates;
  doc["warmup_days"] = warmup();
  doc["novelty_basis"] = novelty_basis_name(novelty_basis);
  doc["baseline"] = baseline ? OrderedJson(baseline->describe()) : OrderedJson(nullptr);
  doc["challenger"] = challenger ? OrderedJson(challenger->describe()) : OrderedJson(nullptr);
  // workers is deliberately not echoed: output must not depend on it.
  return doc;
}

std::vector<CutSpec> sample_cuts(const TemporalIndex& index, const ExperimentPlan& plan) {
  const Day lo = index.min_day() + plan.warmup();
  const Day hi = index.max_day() - plan.future_window;
  const std::int64_t feasible = hi >= lo ? hi - lo + 1 : 0;
  if (feasible < static_cast<std::int64_t>(plan.n_cuts)) {
    throw RangeError("cannot draw " + std::to_string(plan.n_cuts) + " distinct cut days: only " +
                     std::to_string(feasible) + " feasible in [min_day + " +
                     std::to_string(plan.warmup()) + ", max_day - " +
                     std::to_string(plan.future_window) + "]");
  }
  Random rng(plan.seed);
  std::vector<CutSpec> cuts;
  for (const auto offset :
       rng.sample_without_replacement(static_cast<std::uint64_t>(feasible), plan.n_cuts)) {
    cuts.push_back(CutSpec{lo + static_cast<Day>(offset), plan.past_window, plan.future_window});
  }
  return cuts;
}

std::vector<MetricRow> evaluate_cut(const TemporalIndex& index, const CutSpec& cut,
                                    const PredictorSpec& spec, const std::vector<std::size_t>& ns,
                                    NoveltyBasis basis) {
  CutSpec effective = cut;
  effective.past_window = spec.past_window;
  const ScoreTable table = score(index, effective, spec);
  const GroundTruth truth = make_ground_truth(index, cut);
  const ScoreTable basis_table = novelty_basis_table(index, cut, basis);
  std::vector<MetricRow> rows;
  for (const auto& triple : evaluate(table, truth, basis_table, ns)) {
    rows.push_back(MetricRow{cut.t, canonical(spec), cut.future_window, triple.n, triple.p_n,
                             triple.q_n, triple.auc});
  }
  return rows;
}

ExperimentReport run_grid(const TemporalIndex& index, const ExperimentPlan& plan) {
  plan.validate();
  ExperimentReport report;
  report.plan = plan;
  report.cuts = sample_cuts(index, plan);
  run_cells(index, plan, report.cuts, report);
  report.finalize();
  return report;
}

ExperimentReport horizon_sweep(const TemporalIndex& index, const ExperimentPlan& plan,
                               const std::vector<Day>& future_windows) {
  if (future_windows.empty()) throw ContractError("horizon sweep needs at least one T_F");
  plan.validate();
  ExperimentPlan sampling = plan;
  sampling.future_window = *std::max_element(future_windows.begin(), future_windows.end());
  sampling.validate();
  const auto base_cuts = sample_cuts(index, sampling);

  ExperimentReport report;
  report.plan = plan;
  report.cuts = base_cuts;
  for (const Day tf : future_windows) {
    ExperimentPlan step = plan;
    step.future_window = tf;
    step.validate();
    std::vector<CutSpec> cuts = base_cuts;
    for (auto& cut : cuts) cut.future_window = tf;
    run_cells(index, step, cuts, report);
  }
  report.finalize();
  return report;
}

void ExperimentReport::finalize() {
  std::map<GroupKey, std::size_t> slot;
  averages.clear();
  struct Sums {
    double p = 0, q = 0, a = 0;
  };
  std::vector<Sums> sums;
  for (const auto& row : rows) {
    const auto key = group_key(row.spec, row.future_window, row.n);
    auto [it, inserted] = slot.try_emplace(key, averages.size());
    if (inserted) {
      averages.push_back(AverageRow{canonical(row.spec), row.future_window, row.n});
      sums.emplace_back();
    }
    AverageRow& avg = averages[it->second];
    Sums& s = sums[it->second];
    ++avg.n_rows;
    if (row.p_n) s.p += *row.p_n.value, ++avg.p_defined;
    if (row.q_n) s.q += *row.q_n.value, ++avg.q_defined;
    if (row.auc) s.a += *row.auc.value, ++avg.auc_defined;
  }
  for (std::size_t i = 0; i < averages.size(); ++i) {
    AverageRow& avg = averages[i];
    if (avg.p_defined) avg.p_n = sums[i].p / static_cast<double>(avg.p_defined);
    if (avg.q_defined) avg.q_n = sums[i].q / static_cast<double>(avg.q_defined);
    if (avg.auc_defined) avg.auc = sums[i].a / static_cast<double>(avg.auc_defined);
  }

  // Independent recomputation: gather per-group value lists, then average.
  std::map<GroupKey, std::array<std::vector<double>, 3>> values;
  for (const auto& row : rows) {
    auto& v = values[group_key(row.spec, row.future_window, row.n)];
    if (row.p_n) v[0].push_back(*row.p_n.value);
    if (row.q_n) v[1].push_back(*row.q_n.value);
    if (row.auc) v[2].push_back(*row.auc.value);
  }
  const auto close = [](const std::optional<double>& a, const std::optional<double>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || std::abs(*a - *b) <= 1e-12;
  };
  for (const auto& avg : averages) {
    const auto& v = values.at(group_key(avg.spec, avg.future_window, avg.n));
    if (!close(avg.p_n, mean(v[0])) || !close(avg.q_n, mean(v[1])) || !close(avg.auc, mean(v[2]))) {
      throw Error("report averages disagree with their raw rows");
    }
  }
}

std::optional<double> MetricComparison::delta() const {
  if (!baseline || !challenger) return std::nullopt;
  return *challenger - *baseline;
}

std::optional<double> MetricComparison::win_rate() const {
  const std::size_t compared = wins + ties + losses;
  if (compared == 0) return std::nullopt;
  return (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) /
         static_cast<double>(compared);
}

Comparison compare_predictors(const ExperimentReport& report, const Selector& baseline,
                              const Selector& challenger) {
  // Distinct parameterizations, in report order.
  std::vector<std::pair<PredictorSpec, Day>> configs;
  for (const auto& avg : report.averages) {
    const std::pair<PredictorSpec, Day> config{avg.spec, avg.future_window};
    if (std::find(configs.begin(), configs.end(), config) == configs.end()) configs.push_back(config);
  }
  const auto resolve = [&](const Selector& sel, const char* role) {
    std::vector<std::pair<PredictorSpec, Day>> hits;
    for (const auto& c : configs) {
      if (matches(sel, c.first, c.second)) hits.push_back(c);
    }
    if (hits.size() != 1) {
      throw ContractError(std::string(role) + " selector '" + sel.describe() + "' matches " +
                          std::to_string(hits.size()) + " parameterizations (need exactly 1)");
    }
    return hits.front();
  };
  const auto [base_spec, base_tf] = resolve(baseline, "baseline");
  const auto [chal_spec, chal_tf] = resolve(challenger, "challenger");
  if (base_tf != chal_tf) throw ContractError("baseline and challenger use different T_F");

  Comparison out{base_spec, chal_spec, base_tf, {}};
  std::map<std::pair<Day, std::size_t>, const MetricRow*> base_rows;
  std::map<std::pair<Day, std::size_t>, const MetricRow*> chal_rows;
  for (const auto& row : report.rows) {
    if (row.future_window != base_tf) continue;
    if (canonical(row.spec) == base_spec) base_rows[{row.t, row.n}] = &row;
    if (canonical(row.spec) == chal_spec) chal_rows[{row.t, row.n}] = &row;
  }
  for (const std::size_t n : report.plan.ns) {
    ComparisonRow row;
    row.n = n;
    for (const auto& avg : report.averages) {
      if (avg.n != n || avg.future_window != base_tf) continue;
      if (avg.spec == base_spec) {
        row.p_n.baseline = avg.p_n, row.q_n.baseline = avg.q_n, row.auc.baseline = avg.auc;
      }
      if (avg.spec == chal_spec) {
        row.p_n.challenger = avg.p_n, row.q_n.challenger = avg.q_n, row.auc.challenger = avg.auc;
      }
    }
    const auto tally = [](MetricComparison& m, const MetricValue& b, const MetricValue& c) {
      if (!b || !c) return;
      if (*c.value > *b.value) {
        ++m.wins;
      } else if (*c.value == *b.value) {
        ++m.ties;
      } else {
        ++m.losses;
      }
    };
    for (const auto& [key, base] : base_rows) {
      if (key.second != n) continue;
      const auto it = chal_rows.find(key);
      if (it == chal_rows.end()) continue;
      tally(row.p_n, base->p_n, it->second->p_n);
      tally(row.q_n, base->q_n, it->second->q_n);
      tally(row.auc, base->auc, it->second->auc);
    }
    out.rows.push_back(row);
  }
  return out;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
  out << "t,predictor,lambda,gamma,T_P,T_F,n,p_n,q_n,auc,q_defined,auc_defined\n";
  for (const auto& row : rows) {
    const PredictorSpec s = canonical(row.spec);
    out << row.t << ',' << to_string(s.kind) << ','
        << (uses_lambda(s.kind) ? format_double(s.lambda) : "") << ','
        << (uses_gamma(s.kind) ? format_double(s.gamma) : "") << ',' << s.past_window << ','
        << row.future_window << ',' << row.n << ',' << metric_text(row.p_n) << ','
        << metric_text(row.q_n) << ',' << metric_text(row.auc) << ',' << (row.q_n ? 1 : 0) << ','
        << (row.auc ? 1 : 0) << '\n';
  }
}

std::vector<MetricRow> read_metrics_csv(std::istream& in) {
  std::vector<MetricRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("t,predictor", 0) == 0) continue;
    const auto f = split_csv(line);
    if (f.size() != 12) throw ParseError(line_no, "expected 12 metric columns");
    MetricRow row;
    row.t = parse_number<Day>(f[0], line_no, "t");
    try {
      row.spec.kind = parse_predictor_kind(std::string(f[1]));
    } catch (const ContractError& e) {
      throw ParseError(line_no, e.what());
    }
    row.spec.lambda = f[2].empty() ? 0.0 : parse_number<double>(f[2], line_no, "lambda");
    row.spec.gamma = f[3].empty() ? 0.0 : parse_number<double>(f[3], line_no, "gamma");
    row.spec.past_window = parse_number<Day>(f[4], line_no, "T_P");
    row.future_window = parse_number<Day>(f[5], line_no, "T_F");
    row.n = parse_number<std::size_t>(f[6], line_no, "n");
    row.p_n = parse_metric(f[7], line_no, "p_n", UndefinedReason::kEmptyCandidates);
    row.q_n = parse_metric(f[8], line_no, "q_n", UndefinedReason::kEmptyNoveltySet);
    row.auc = parse_metric(f[9], line_no, "auc", UndefinedReason::kEmptyNegativeSet);
    row.spec = canonical(row.spec);
    rows.push_back(row);
  }
  return rows;
}

OrderedJson summary_json(const ExperimentReport& report) {
  OrderedJson doc;
  doc["schema_version"] = kSchemaVersion;
  doc["software"] = std::string("trendpred ") + kVersion;
  doc["plan"] = report.plan.to_json();
  OrderedJson cuts = OrderedJson::array();
  for (const auto& cut : report.cuts) cuts.push_back(cut.t);
  doc["cuts"] = cuts;
  doc["n_rows"] = report.rows.size();

  OrderedJson averages = OrderedJson::array();
  std::size_t q_excluded = 0;
  std::size_t auc_excluded = 0;
  for (const auto& avg : report.averages) {
    OrderedJson a = spec_json(avg.spec);
    a["T_F"] = avg.future_window;
    a["n"] = avg.n;
    a["p_n"] = optional_json(avg.p_n);
    a["q_n"] = optional_json(avg.q_n);
    a["auc"] = optional_json(avg.auc);
    a["n_cuts"] = avg.n_rows;
    a["q_defined"] = avg.q_defined;
    a["q_excluded"] = avg.q_excluded();
    a["auc_defined"] = avg.auc_defined;
    a["auc_excluded"] = avg.auc_excluded();
    q_excluded += avg.q_excluded();
    auc_excluded += avg.auc_excluded();
    averages.push_back(a);
  }
  doc["averages"] = averages;
  doc["exclusions"] = {{"q_n", q_excluded}, {"auc", auc_excluded}};

  OrderedJson failures = OrderedJson::array();
  for (const auto& f : report.failures) {
    OrderedJson j = spec_json(f.spec);
    j["t"] = f.t;
    j["T_F"] = f.future_window;
    j["reason"] = f.reason;
    failures.push_back(j);
  }
  doc["failed_cells"] = failures;

  if (report.plan.baseline && report.plan.challenger) {
    OrderedJson comparisons = OrderedJson::array();
    std::vector<Day> windows;
    for (const auto& avg : report.averages) {
      if (std::find(windows.begin(), windows.end(), avg.future_window) == windows.end()) {
        windows.push_back(avg.future_window);
      }
    }
    for (const Day tf : windows) {
      Selector base = *report.plan.baseline;
      Selector chal = *report.plan.challenger;
      if (!base.future_window) base.future_window = tf;
      if (!chal.future_window) chal.future_window = tf;
      try {
        comparisons.push_back(comparison_json(compare_predictors(report, base, chal)));
      } catch (const ContractError& e) {
        comparisons.push_back({{"T_F", tf}, {"error", e.what()}});
      }
    }
    doc["comparisons"] = comparisons;
  }
  return doc;
}

OrderedJson comparison_json(const Comparison& comparison) {
  OrderedJson doc;
  doc["baseline"] = spec_json(comparison.baseline);
  doc["challenger"] = spec_json(comparison.challenger);
  doc["T_F"] = comparison.future_window;
  OrderedJson rows = OrderedJson::array();
  for (const auto& row : comparison.rows) {
    OrderedJson r;
    r["n"] = row.n;
    r["p_n"] = comparison_metric_json(row.p_n);
    r["q_n"] = comparison_metric_json(row.q_n);
    r["auc"] = comparison_metric_json(row.auc);
    rows.push_back(r);
  }
  doc["rows"] = rows;
  return doc;
}

void write_comparison_table(std::ostream& out, const Comparison& comparison) {
  const auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *v);
    return std::string(buf);
  };
  const auto join = [&](auto member, bool challenger) {
    std::string s;
    for (std::size_t i = 0; i < comparison.rows.size(); ++i) {
      const MetricComparison& m = comparison.rows[i].*member;
      if (i) s += ", ";
      s += cell(challenger ? m.challenger : m.baseline);
    }
    return s;
  };
  std::string ns;
  for (std::size_t i = 0; i < comparison.rows.size(); ++i) {
    ns += (i ? "/" : "") + std::to_string(comparison.rows[i].n);
  }
  out << "Type\tchallenger " << to_string(comparison.challenger.kind) << ' ' << ns
      << "\tbaseline " << to_string(comparison.baseline.kind) << ' ' << ns << '\n';
  out << "Pn\t" << join(&ComparisonRow::p_n, true) << '\t' << join(&ComparisonRow::p_n, false) << '\n';
  out << "Qn\t" << join(&ComparisonRow::q_n, true) << '\t' << join(&ComparisonRow::q_n, false) << '\n';
  out << "AUC\t" << join(&ComparisonRow::auc, true) << '\t' << join(&ComparisonRow::auc, false)
      << '\n';
}

}  // namespace trendpred
