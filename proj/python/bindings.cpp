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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "trendpred/event_log.hpp"
#include "trendpred/experiment.hpp"
#include "trendpred/metrics.hpp"
#include "trendpred/predictors.hpp"
#include "trendpred/synthgen.hpp"
#include "trendpred/temporal_index.hpp"

namespace py = pybind11;
using namespace trendpred;

namespace {

PredictorSpec make_spec(const std::string& predictor, double lam, double gamma, Day tp,
                        const std::string& decay_scope, const std::string& pbp_form) {
  PredictorSpec spec{parse_predictor_kind(predictor), lam, gamma, tp};
  if (spec.kind == PredictorKind::kTotalPopularity) spec.lambda = 0.0;
  if (decay_scope == "window") {
    spec.decay_scope = DecayScope::kPastWindow;
  } else if (decay_scope != "all") {
    throw ContractError("decay_scope must be 'all' or 'window'");
  }
  if (pbp_form == "window-gain") {
    spec.pbp_form = PbpForm::kWindowGain;
  } else if (pbp_form != "lagged") {
    throw ContractError("pbp_form must be 'lagged' or 'window-gain'");
  }
  spec.validate();
  return spec;
}

py::object metric(const MetricValue& v) {
  return v.value ? py::cast(*v.value) : py::none();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "trendpred core bindings";
  m.attr("__version__") = kVersion;

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<ContractError>(m, "ContractError", error.ptr());
  py::register_exception<EmptyInputError>(m, "EmptyInputError", error.ptr());
  py::register_exception<RangeError>(m, "RangeError", error.ptr());

  py::class_<InteractionLog>(m, "InteractionLog")
      .def_readonly("epoch_label", &InteractionLog::epoch_label)
      .def_readonly("n_users", &InteractionLog::n_users)
      .def_readonly("n_items", &InteractionLog::n_items)
      .def_readonly("n_links", &InteractionLog::n_links)
      .def_property_readonly("min_day", &InteractionLog::min_day)
      .def_property_readonly("max_day", &InteractionLog::max_day)
      .def("events",
           [](const InteractionLog& log) {
             py::list out;
             for (const auto& e : log.events) {
               out.append(py::make_tuple(e.user, e.item, e.day,
                                         e.rating ? py::cast(*e.rating) : py::none()));
             }
             return out;
           },
           "List of (user, item, day, rating) tuples in canonical order.")
      .def("to_csv",
           [](const InteractionLog& log) {
             std::ostringstream out;
             write_canonical(out, log);
             return out.str();
           })
      .def("__len__", [](const InteractionLog& log) { return log.events.size(); });

  m.def(
      "parse_events",
      [](const std::string& text, const std::string& time_unit, const std::string& delimiter,
         bool header) {
        if (delimiter.size() != 1) throw ContractError("delimiter must be one character");
        InputFormat format;
        format.time_unit = parse_time_unit(time_unit);
        format.delimiter = delimiter[0];
        format.has_header = header;
        return parse_events_string(text, format);
      },
      py::arg("text"), py::arg("time_unit") = "days", py::arg("delimiter") = ",",
      py::arg("header") = false, "Parse user,item,time[,rating] records.");

  m.def(
      "preprocess",
      [](const InteractionLog& log, std::optional<int> min_rating_exclusive,
         std::size_t min_user_events, std::optional<std::size_t> sample_users, std::uint64_t seed,
         std::optional<std::map<ItemId, UserId>> ownership) {
        PreprocessOptions options;
        options.min_rating_exclusive = min_rating_exclusive;
        options.min_user_events = min_user_events;
        options.sample_users = sample_users;
        options.seed = seed;
        options.ownership = std::move(ownership);
        return preprocess(log, options);
      },
      py::arg("log"), py::arg("min_rating_exclusive") = py::none(),
      py::arg("min_user_events") = 0, py::arg("sample_users") = py::none(),
      py::arg("seed") = 42, py::arg("ownership") = py::none());

  py::class_<TemporalIndex>(m, "TemporalIndex")
      .def(py::init(&TemporalIndex::build), py::arg("log"))
      .def_property_readonly("min_day", &TemporalIndex::min_day)
      .def_property_readonly("max_day", &TemporalIndex::max_day)
      .def_property_readonly("n_items", &TemporalIndex::n_items)
      .def_property_readonly("n_links", &TemporalIndex::n_links)
      .def("degree_at", &TemporalIndex::degree_at, py::arg("item"), py::arg("t"))
      .def("past_gain",
           [](const TemporalIndex& ix, ItemId item, Day t, Day tp) {
             return ix.past_gain(item, CutSpec{t, tp, 1});
           },
           py::arg("item"), py::arg("t"), py::arg("tp") = 30)
      .def("future_gain",
           [](const TemporalIndex& ix, ItemId item, Day t, Day tf) {
             return ix.future_gain(item, CutSpec{t, 1, tf});
           },
           py::arg("item"), py::arg("t"), py::arg("tf") = 30)
      .def("decay_weight_sum",
           [](const TemporalIndex& ix, ItemId item, Day t, double gamma) {
             return ix.decay_weight_sum(item, t, gamma);
           },
           py::arg("item"), py::arg("t"), py::arg("gamma"))
      .def("candidate_items", &TemporalIndex::candidate_items, py::arg("t"));

  py::class_<ScoreTable>(m, "ScoreTable")
      .def_property_readonly("t", [](const ScoreTable& s) { return s.cut.t; })
      .def_property_readonly("predictor", [](const ScoreTable& s) { return to_string(s.spec.kind); })
      .def_readonly("normalized", &ScoreTable::normalized)
      .def_property_readonly("all_zero",
                             [](const ScoreTable& s) { return s.status == ScoreStatus::kAllZero; })
      .def_readonly("scores", &ScoreTable::scores)
      .def("as_dict",
           [](const ScoreTable& s) {
             return std::map<ItemId, double>(s.scores.begin(), s.scores.end());
           })
      .def("__len__", &ScoreTable::size);

  m.def(
      "score",
      [](const TemporalIndex& index, Day t, const std::string& predictor, double lam, double gamma,
         Day tp, const std::string& decay_scope, const std::string& pbp_form) {
        const auto spec = make_spec(predictor, lam, gamma, tp, decay_scope, pbp_form);
        return score(index, CutSpec{t, tp, 1}, spec);
      },
      py::arg("index"), py::arg("t"), py::arg("predictor") = "proposed", py::arg("lam") = 0.9,
      py::arg("gamma") = 0.1, py::arg("tp") = 30, py::arg("decay_scope") = "all",
      py::arg("pbp_form") = "lagged");

  m.def("rank_top_n", [](const ScoreTable& table, std::size_t n) { return rank_top_n(table, n); },
        py::arg("table"), py::arg("n"));

  m.def(
      "evaluate",
      [](const TemporalIndex& index, Day t, const std::vector<std::size_t>& ns,
         const std::string& predictor, double lam, double gamma, Day tp, Day tf,
         const std::string& novelty_basis) {
        const auto spec = make_spec(predictor, lam, gamma, tp, "all", "lagged");
        NoveltyBasis basis = NoveltyBasis::kCumulativeDegree;
        if (novelty_basis == "past-gain") {
          basis = NoveltyBasis::kPastWindowGain;
        } else if (novelty_basis != "degree") {
          throw ContractError("novelty_basis must be 'degree' or 'past-gain'");
        }
        py::list out;
        for (const auto& row : evaluate_cut(index, CutSpec{t, tp, tf}, spec, ns, basis)) {
          py::dict d;
          d["n"] = row.n;
          d["p_n"] = metric(row.p_n);
          d["q_n"] = metric(row.q_n);
          d["auc"] = metric(row.auc);
          out.append(d);
        }
        return out;
      },
      py::arg("index"), py::arg("t"), py::arg("ns") = std::vector<std::size_t>{50, 100, 200},
      py::arg("predictor") = "proposed", py::arg("lam") = 0.9, py::arg("gamma") = 0.1,
      py::arg("tp") = 30, py::arg("tf") = 30, py::arg("novelty_basis") = "degree",
      "P_n, Q_n and AUC per n; undefined values are None.");

  m.def(
      "run_grid",
      [](const TemporalIndex& index, const std::string& plan_json) {
        const auto plan = ExperimentPlan::from_json(nlohmann::json::parse(plan_json));
        ExperimentReport report;
        {
          py::gil_scoped_release release;
          report = run_grid(index, plan);
        }
        std::ostringstream csv;
        write_metrics_csv(csv, report.rows);
        py::dict out;
        out["metrics_csv"] = csv.str();
        out["summary_json"] = summary_json(report).dump(2);
        out["ok"] = report.ok();
        return out;
      },
      py::arg("index"), py::arg("plan_json") = "{}",
      "Run a plan given as JSON; returns metrics CSV and summary JSON text.");

  m.def(
      "generate",
      [](Day horizon_days, std::size_t links_per_day, double new_items_per_day,
         std::size_t n_users, double attachment_offset, const std::string& fitness,
         double fitness_mean, double theta, std::uint64_t seed) {
        SynthModelParams p;
        p.horizon_days = horizon_days;
        p.links_per_day = links_per_day;
        p.new_items_per_day = new_items_per_day;
        p.n_users = n_users;
        p.attachment_offset = attachment_offset;
        p.fitness = parse_fitness_kind(fitness);
        p.fitness_mean = fitness_mean;
        p.aging_rate = theta;
        p.seed = seed;
        auto truth = generate(p);
        py::list items;
        for (const auto& item : truth.items) {
          items.append(py::make_tuple(item.id, item.birth_day, item.fitness));
        }
        return py::make_tuple(std::move(truth.log), items);
      },
      py::arg("horizon_days") = 365, py::arg("links_per_day") = 100,
      py::arg("new_items_per_day") = 5.0, py::arg("n_users") = 10000,
      py::arg("attachment_offset") = 1.0, py::arg("fitness") = "uniform",
      py::arg("fitness_mean") = 1.0, py::arg("theta") = 0.05, py::arg("seed") = 42,
      "Synthetic log; returns (log, [(item, birth_day, fitness), ...]).");
}
