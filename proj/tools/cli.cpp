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

#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "trendpred/event_log.hpp"
#include "trendpred/experiment.hpp"
#include "trendpred/metrics.hpp"
#include "trendpred/predictors.hpp"
#include "trendpred/synthgen.hpp"
#include "trendpred/temporal_index.hpp"

namespace trendpred::cli {
namespace {

namespace fs = std::filesystem;

/// Input that cannot be opened; maps to kUsageError.
class InputError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << contents;
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  if (p.extension() == ".csv") return p.replace_extension(".json");
  return fs::path(csv.string() + ".json");
}

InteractionLog load_events(const std::string& path, TimeUnit unit) {
  InputFormat format = canonical_format();
  format.time_unit = unit;
  std::istringstream in(read_file(path));
  try {
    return parse_events(in, format);
  } catch (const ParseError& e) {
    throw Error(path + ": " + e.what());
  }
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size() || v <= 0) throw std::invalid_argument(part);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw ContractError("bad list entry '" + part + "' (expected positive integers)");
    }
  }
  if (out.empty()) throw ContractError("empty list");
  return out;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::logic_error&) {
      throw ContractError("bad list entry '" + part + "' (expected real numbers)");
    }
  }
  if (out.empty()) throw ContractError("empty list");
  return out;
}

const std::map<std::string, TimeUnit> kTimeUnits{{"days", TimeUnit::kDays},
                                                 {"epoch-seconds", TimeUnit::kEpochSeconds},
                                                 {"iso8601", TimeUnit::kIso8601}};

struct PredictorFlags {
  std::string predictor = "proposed";
  double lambda = 0.9;
  double gamma = 0.1;
  Day tp = 30;
  std::string decay_scope = "all";
  std::string pbp_form = "lagged";

  void add_to(CLI::App& app) {
    app.add_option("--predictor", predictor, "Predictor")
        ->check(CLI::IsMember({"total", "pbp", "proposed"}));
    app.add_option("--lambda", lambda, "Weight of the lagged degree, in [0,1]")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--gamma", gamma, "Decay rate per day (proposed only)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--tp", tp, "Past window in days")->check(CLI::PositiveNumber);
    app.add_option("--decay-scope", decay_scope, "Links entering the decay sum")
        ->check(CLI::IsMember({"all", "window"}));
    app.add_option("--pbp-form", pbp_form, "Reading of the lagged PBP term")
        ->check(CLI::IsMember({"lagged", "window-gain"}));
  }

  PredictorSpec spec() const {
    PredictorSpec s{parse_predictor_kind(predictor), lambda, gamma, tp};
    s.decay_scope = decay_scope == "all" ? DecayScope::kAllLinks : DecayScope::kPastWindow;
    s.pbp_form = pbp_form == "lagged" ? PbpForm::kLaggedDegree : PbpForm::kWindowGain;
    if (s.kind == PredictorKind::kTotalPopularity) s.lambda = 0.0;
    s.validate();
    return canonical(s);
  }
};

struct GridFlags {
  std::string plan_path;
  std::optional<std::size_t> cuts;
  std::optional<std::uint64_t> seed;
  std::optional<Day> tp;
  std::optional<Day> tf;
  std::string ns;
  std::string lambdas;
  std::string gammas;
  std::optional<std::size_t> workers;

  void add_to(CLI::App& app, bool with_tf) {
    app.add_option("--plan", plan_path, "Experiment plan JSON")->check(CLI::ExistingFile);
    app.add_option("--cuts", cuts, "Number of sampled cut days [plan: 10]")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Seed for cut sampling [plan: 42]");
    app.add_option("--tp", tp, "Past window in days [plan: 30]")->check(CLI::PositiveNumber);
    if (with_tf) app.add_option("--tf", tf, "Future window in days [plan: 30]")->check(CLI::PositiveNumber);
    app.add_option("--n", ns, "Comma-separated list lengths [plan: 50,100,200]");
    app.add_option("--lambda", lambdas, "Comma-separated lambda grid [plan: 0.9]");
    app.add_option("--gamma", gammas, "Comma-separated gamma grid [plan: 0.1]");
    app.add_option("--workers", workers, "Worker threads (output does not depend on it) [1]")
        ->check(CLI::PositiveNumber);
  }

  ExperimentPlan plan(ExperimentPlan base) const {
    if (!plan_path.empty()) {
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(read_file(plan_path));
      } catch (const nlohmann::json::parse_error& e) {
        throw ContractError("plan '" + plan_path + "' is not valid JSON: " + e.what());
      }
      base = ExperimentPlan::from_json(doc);
    }
    if (cuts) base.n_cuts = *cuts;
    if (seed) base.seed = *seed;
    if (tp) base.past_window = *tp;
    if (tf) base.future_window = *tf;
    if (!ns.empty()) base.ns = parse_size_list(ns);
    if (!lambdas.empty()) base.lambda_grid = parse_real_list(lambdas);
    if (!gammas.empty()) base.gamma_grid = parse_real_list(gammas);
    if (workers) base.workers = *workers;
    base.validate();
    return base;
  }
};

nlohmann::ordered_json log_summary(const InteractionLog& log) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["n_users"] = log.n_users;
  doc["n_items"] = log.n_items;
  doc["n_links"] = log.n_links;
  if (!log.empty()) {
    doc["min_day"] = log.min_day();
    doc["max_day"] = log.max_day();
    doc["day_span"] = log.max_day() - log.min_day();
  }
  doc["epoch_label"] = log.epoch_label;
  return doc;
}

void warn_clamped(const TemporalIndex& index, const std::vector<CutSpec>& cuts,
                  const std::vector<std::size_t>& ns, std::ostream& err) {
  const std::size_t largest = *std::max_element(ns.begin(), ns.end());
  for (const auto& cut : cuts) {
    const std::size_t count = index.candidate_items(cut.t).size();
    if (count < largest) {
      err << "warning: day " << cut.t << " has " << count << " candidates; n = " << largest
          << " is clamped\n";
    }
  }
}

int write_report(const TemporalIndex& index, const ExperimentReport& report, const fs::path& dir,
                 std::ostream& out, std::ostream& err) {
  warn_clamped(index, report.cuts, report.plan.ns, err);
  std::ostringstream csv;
  write_metrics_csv(csv, report.rows);
  write_file(dir / "metrics.csv", csv.str());
  write_file(dir / "summary.json", summary_json(report).dump(2) + "\n");
  out << "wrote " << report.rows.size() << " metric rows to " << (dir / "metrics.csv").string()
      << '\n';
  if (!report.ok()) {
    err << report.failures.size() << " grid cell(s) failed; see summary.json\n";
    return kFailure;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Near-future popularity prediction for timestamped user-item logs", "trendpred"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse, filter and canonicalize a raw interaction file");
  std::string raw_path;
  std::string out_path;
  std::string granularity = "epoch-seconds";
  bool header = false;
  char delimiter = ',';
  std::optional<int> min_rating;
  std::size_t min_user_events = 0;
  bool activity_before_rating = false;
  std::optional<std::size_t> sample_count;
  std::uint64_t seed = 42;
  std::string ownership_path;
  ingest->add_option("raw", raw_path, "Raw file: user_id,item_id,timestamp[,rating]")->required();
  ingest->add_option("--out", out_path, "Canonical event CSV to write")->required();
  ingest->add_option("--day-granularity", granularity, "Timestamp column unit")
      ->check(CLI::IsMember({"days", "epoch-seconds", "iso8601"}));
  ingest->add_flag("--header", header, "First record line is a header");
  ingest->add_option("--delimiter", delimiter, "Field delimiter");
  ingest->add_option("--min-rating-exclusive", min_rating,
                     "Keep links whose rating is strictly greater [off]");
  ingest->add_option("--min-user-events", min_user_events, "Drop users with fewer links");
  ingest->add_flag("--count-activity-before-rating", activity_before_rating,
                   "Count user activity before the rating filter");
  ingest->add_option("--sample-users", sample_count, "Keep this many randomly chosen users [off]");
  ingest->add_option("--seed", seed, "Seed for user sampling");
  ingest->add_option("--ownership", ownership_path,
                     "item_id,owner_user_id file; removes links from owners to their items");

  // score
  auto* score_cmd = app.add_subcommand("score", "Score candidate items at a cut day");
  std::string events_path;
  std::string events_granularity = "days";
  PredictorFlags predictor;
  Day cut_day = 0;
  bool normalize = false;
  score_cmd->add_option("events", events_path, "Canonical event CSV")->required();
  predictor.add_to(*score_cmd);
  score_cmd->add_option("--t", cut_day, "Cut day")->required();
  score_cmd->add_option("--out", out_path, "Score CSV; a .json sidecar is written next to it")
      ->required();
  score_cmd->add_flag("--normalize", normalize, "Normalize total/pbp scores to unit sum");
  score_cmd->add_option("--day-granularity", events_granularity, "Event file time unit")
      ->check(CLI::IsMember({"days", "epoch-seconds", "iso8601"}));

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Metrics of one predictor at one cut day");
  PredictorFlags eval_predictor;
  Day eval_tf = 30;
  std::string eval_ns = "50,100,200";
  std::string basis = "degree";
  eval_cmd->add_option("events", events_path, "Canonical event CSV")->required();
  eval_predictor.add_to(*eval_cmd);
  eval_cmd->add_option("--t", cut_day, "Cut day")->required();
  eval_cmd->add_option("--tf", eval_tf, "Future window in days")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--n", eval_ns, "Comma-separated list lengths");
  eval_cmd->add_option("--novelty-basis", basis, "Incumbent ranking for novelty")
      ->check(CLI::IsMember({"degree", "past-gain"}));
  eval_cmd->add_option("--out", out_path, "Metrics CSV")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a predictor grid over sampled cut days");
  GridFlags sweep_flags;
  sweep->add_option("events", events_path, "Canonical event CSV")->required();
  sweep_flags.add_to(*sweep, true);
  sweep->add_option("--out", out_path, "Output directory")->required();

  // horizon
  auto* horizon = app.add_subcommand("horizon", "Sweep the future window over shared cut days");
  GridFlags horizon_flags;
  std::string tf_list = "30,60,90,120,150,200";
  horizon->add_option("events", events_path, "Canonical event CSV")->required();
  horizon_flags.add_to(*horizon, false);
  horizon->add_option("--tf", tf_list, "Comma-separated future windows in days");
  horizon->add_option("--out", out_path, "Output directory")->required();

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic log (attachment, fitness, aging)");
  SynthModelParams synth_params;
  std::string fitness = "uniform";
  synth->add_option("--theta", synth_params.aging_rate, "Aging rate per day")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--fitness", fitness, "Fitness distribution")
      ->check(CLI::IsMember({"constant", "uniform", "exponential"}));
  synth->add_option("--fitness-mean", synth_params.fitness_mean, "Mean of exponential fitness");
  synth->add_option("--horizon", synth_params.horizon_days, "Days to simulate")
      ->check(CLI::PositiveNumber);
  synth->add_option("--links-per-day", synth_params.links_per_day, "Links per day")
      ->check(CLI::PositiveNumber);
  synth->add_option("--new-items-per-day", synth_params.new_items_per_day,
                    "Expected item births per day")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--users", synth_params.n_users, "User population")->check(CLI::PositiveNumber);
  synth->add_option("--offset", synth_params.attachment_offset, "Additive attachment offset")
      ->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_params.seed, "Generator seed");
  synth->add_option("--out", out_path, "Output directory (events.csv, truth.csv)")->required();

  // compare
  auto* compare = app.add_subcommand("compare", "Side-by-side table of two predictors in a report");
  std::string report_path;
  std::string baseline_text = "pbp";
  std::string challenger_text = "proposed";
  compare->add_option("report", report_path, "metrics.csv or the directory holding it")->required();
  compare->add_option("--baseline", baseline_text, "Selector kind[,lambda=R][,gamma=R][,tp=D][,tf=D]");
  compare->add_option("--challenger", challenger_text, "Selector for the challenger");
  compare->add_option("--out", out_path, "Comparison JSON to write [stdout only]");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*ingest) {
      InputFormat format;
      format.time_unit = kTimeUnits.at(granularity);
      format.has_header = header;
      format.delimiter = delimiter;
      PreprocessOptions options;
      options.min_rating_exclusive = min_rating;
      options.min_user_events = min_user_events;
      options.count_activity_before_rating_filter = activity_before_rating;
      options.sample_users = sample_count;
      options.seed = seed;
      if (!ownership_path.empty()) {
        std::istringstream own(read_file(ownership_path));
        options.ownership = parse_ownership(own);
      }
      std::istringstream in(read_file(raw_path));
      InteractionLog log;
      try {
        log = parse_events(in, format);
      } catch (const ParseError& e) {
        throw Error(raw_path + ": " + e.what());
      }
      log = preprocess(log, options);
      std::ostringstream csv;
      write_canonical(csv, log);
      write_file(out_path, csv.str());
      auto summary = log_summary(log);
      summary["seed"] = seed;
      out << summary.dump(2) << '\n';
      return kOk;
    }

    if (*score_cmd) {
      const auto spec = predictor.spec();
      const auto index = TemporalIndex::build(load_events(events_path, kTimeUnits.at(events_granularity)));
      ScoreTable table = score(index, CutSpec{cut_day, spec.past_window, 1}, spec);
      if (normalize && !table.normalized) table = normalize_scores(std::move(table));
      std::ostringstream csv;
      write_scores_csv(csv, table);
      write_file(out_path, csv.str());
      write_file(sidecar_path(out_path), scores_sidecar_json(table));
      out << "scored " << table.size() << " candidates at day " << cut_day << '\n';
      if (table.status == ScoreStatus::kAllZero) err << "warning: every score is zero\n";
      return kOk;
    }

    if (*eval_cmd) {
      const auto spec = eval_predictor.spec();
      const auto ns = parse_size_list(eval_ns);
      const auto index = TemporalIndex::build(load_events(events_path, TimeUnit::kDays));
      const CutSpec cut{cut_day, spec.past_window, eval_tf};
      if (cut.t >= index.min_day() && cut.t <= index.max_day() && index.truncated(cut)) {
        err << "warning: future window runs past the last recorded day " << index.max_day() << '\n';
      }
      if (cut.t >= index.min_day() && cut.t <= index.max_day()) warn_clamped(index, {cut}, ns, err);
      const auto rows = evaluate_cut(index, cut, spec, ns,
                                     basis == "degree" ? NoveltyBasis::kCumulativeDegree
                                                       : NoveltyBasis::kPastWindowGain);
      std::ostringstream csv;
      write_metrics_csv(csv, rows);
      write_file(out_path, csv.str());
      out << csv.str();
      return kOk;
    }

    if (*sweep) {
      const auto plan = sweep_flags.plan(ExperimentPlan{});
      const auto index = TemporalIndex::build(load_events(events_path, TimeUnit::kDays));
      return write_report(index, run_grid(index, plan), out_path, out, err);
    }

    if (*horizon) {
      ExperimentPlan defaults;
      defaults.predictors = {PredictorTemplate{PredictorKind::kProposed, 0.9, 0.1},
                             PredictorTemplate{PredictorKind::kPbp, 0.9, std::nullopt, 60}};
      const auto plan = horizon_flags.plan(defaults);
      std::vector<Day> windows;
      for (const auto w : parse_size_list(tf_list)) windows.push_back(static_cast<Day>(w));
      const auto index = TemporalIndex::build(load_events(events_path, TimeUnit::kDays));
      return write_report(index, horizon_sweep(index, plan, windows), out_path, out, err);
    }

    if (*synth) {
      synth_params.fitness = parse_fitness_kind(fitness);
      const SynthTruth truth = generate(synth_params);
      std::ostringstream events_csv;
      std::ostringstream truth_csv;
      write_canonical(events_csv, truth.log);
      write_truth_csv(truth_csv, truth);
      write_file(fs::path(out_path) / "events.csv", events_csv.str());
      write_file(fs::path(out_path) / "truth.csv", truth_csv.str());
      auto summary = log_summary(truth.log);
      summary["n_generated_items"] = truth.items.size();
      summary["seed"] = synth_params.seed;
      out << summary.dump(2) << '\n';
      return kOk;
    }

    if (*compare) {
      const Selector baseline = Selector::parse(baseline_text);
      const Selector challenger = Selector::parse(challenger_text);
      fs::path metrics = report_path;
      if (fs::is_directory(metrics)) metrics /= "metrics.csv";
      std::istringstream in(read_file(metrics.string()));
      ExperimentReport report;
      report.rows = read_metrics_csv(in);
      std::set<std::size_t> ns;
      std::set<Day> cuts;
      for (const auto& row : report.rows) ns.insert(row.n), cuts.insert(row.t);
      report.plan.ns.assign(ns.begin(), ns.end());
      for (const Day t : cuts) report.cuts.push_back(CutSpec{t});
      report.finalize();
      const Comparison comparison = compare_predictors(report, baseline, challenger);
      write_comparison_table(out, comparison);
      if (!out_path.empty()) write_file(out_path, comparison_json(comparison).dump(2) + "\n");
      return kOk;
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const RangeError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsageError;
}

}  // namespace trendpred::cli
