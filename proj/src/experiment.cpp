// Copyright 2026 The vdaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vdaudit/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>

#include "vdaudit/dataset.hpp"
#include "vdaudit/error.hpp"
#include "vdaudit/fairpick.hpp"
#include "vdaudit/id3.hpp"
#include "vdaudit/mia.hpp"
#include "vdaudit/random.hpp"
#include "vdaudit/serialize.hpp"

namespace vdaudit::experiment {
namespace {

// Metric columns of summary.csv, in order.
const std::vector<std::string> kMetricNames = {
    "train_accuracy", "test_accuracy", "precision", "recall",         "vd",
    "abs_vd",         "vd_dp",         "change_c",  "vd_reduction_pct", "train_size"};

std::string format_number(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> optional_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

nlohmann::json bins_json(const std::array<std::array<double, 2>, metrics::kBins>& bins) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t b = 0; b < metrics::kBins; ++b) {
    out.push_back({{"lo", static_cast<double>(b) / metrics::kBins},
                   {"hi", static_cast<double>(b + 1) / metrics::kBins},
                   {"protected", bins[b][0]},
                   {"unprotected", bins[b][1]}});
  }
  return out;
}

std::uint64_t cell_seed(std::uint64_t master, const std::string& key, int trial) {
  return derive_seed(derive_seed(master, "cell:" + key), "trial", static_cast<std::uint64_t>(trial));
}

struct Shared {
  const config::ExperimentConfig& cfg;
  const data::Dataset& data;
  std::vector<std::optional<double>> epsilons;    // none first
  std::vector<std::optional<double>> thresholds;  // none first
};

// One target/attack/metrics pass for a cell.
void run_cell(const Shared& sh, const data::Dataset& train, const data::Dataset& test,
              const data::AttackData& ad, std::optional<double> epsilon,
              std::optional<double> baseline_vd, RunRecord& rec) {
  const config::ExperimentConfig& cfg = sh.cfg;
  const id3::DecisionTree tree =
      epsilon ? id3::train_dp_id3(train, cfg.depth, id3::DpConfig{*epsilon, true},
                                  derive_seed(rec.seed, "dp"))
              : id3::train_id3(train, cfg.depth);
  rec.train_size = train.size();
  rec.train_accuracy = id3::accuracy(tree, train);
  rec.test_accuracy = id3::accuracy(tree, test);

  const mia::AttackTrainingSet ats =
      mia::build_attack_training_set(tree, ad.attack_members, ad.attack_nonmembers);
  const mia::AttackModel am = mia::train_attack_model(ats, cfg.attack, derive_seed(rec.seed, "attack"));
  const mia::MiaResult res = mia::evaluate_mia(am, tree, ad.eval_members, ad.eval_nonmembers);
  rec.precision = res.precision;
  rec.recall = res.recall;

  const data::GroupAssignment groups = data::binarize_group(ad.eval_members, cfg.protected_attribute);
  std::vector<metrics::VdRecord> members(ad.eval_members.size());
  const auto width = static_cast<std::size_t>(res.class_count);
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto label = static_cast<std::size_t>(ad.eval_members.label(i));
    members[i].predicted = res.member_predictions[i];
    members[i].group = groups.labels[i];
    members[i].probability = std::clamp(res.member_vectors[i * width + label], 0.0, 1.0);
  }
  rec.vd = metrics::recall_by_bin(members);
  if (epsilon) {
    rec.vd.vd_dp = rec.vd.vd;
    if (baseline_vd) rec.vd.change_c = metrics::vd_change(*baseline_vd, rec.vd.vd);
  }
  rec.ok = true;
}

std::map<std::string, RunRecord> run_trial(const Shared& sh, int trial) {
  const config::ExperimentConfig& cfg = sh.cfg;
  std::map<std::string, RunRecord> out;
  auto fail_all = [&](std::optional<double> t, const std::string& why) {
    for (const auto& e : sh.epsilons) {
      RunRecord& rec = out[cell_key(e, t)];
      rec.ok = false;
      rec.error = why;
    }
  };
  for (const auto& t : sh.thresholds) {
    for (const auto& e : sh.epsilons) {
      RunRecord& rec = out[cell_key(e, t)];
      rec.trial = trial;
      rec.seed = cell_seed(cfg.seed, cell_key(e, t), trial);
    }
  }

  const std::uint64_t split_seed = derive_seed(cfg.seed, "split", static_cast<std::uint64_t>(trial));
  const data::SplitSpec spec{cfg.train_fraction, cfg.attack_fraction, cfg.eval_fraction, split_seed};
  data::TrainTest tt;
  try {
    tt = data::split(sh.data, spec);
  } catch (const std::exception& e) {
    for (const auto& t : sh.thresholds) fail_all(t, e.what());
    return out;
  }

  for (const auto& t : sh.thresholds) {
    const std::string t_label = t ? format_number(*t) : "none";
    data::Dataset train = tt.train;
    nlohmann::json diagnostics = nullptr;
    data::AttackData ad;
    try {
      if (t) {
        const std::uint64_t fp_seed = derive_seed(derive_seed(cfg.seed, "fairpick:" + t_label), "trial",
                                                  static_cast<std::uint64_t>(trial));
        fairpick::SolverOptions options;
        options.refine_passes = cfg.refine_passes;
        fairpick::FairPickResult fp =
            fairpick::fairpick(tt.train, data::binarize_group(tt.train, cfg.protected_attribute), *t,
                               cfg.min_per_cluster, fp_seed, options);
        train = std::move(fp.data);
        diagnostics = fp.diagnostics();
      }
      data::SplitSpec sample = spec;
      sample.seed = derive_seed(split_seed, "sample:" + t_label);
      ad = data::sample_attack_data(train, tt.test, sample);
    } catch (const std::exception& e) {
      fail_all(t, e.what());
      continue;
    }

    std::optional<double> baseline_vd;
    for (const auto& e : sh.epsilons) {
      RunRecord& rec = out[cell_key(e, t)];
      rec.fairpick = diagnostics;
      try {
        run_cell(sh, train, tt.test, ad, e, baseline_vd, rec);
        if (!e) baseline_vd = rec.vd.vd;
      } catch (const std::exception& ex) {
        rec.ok = false;
        rec.error = ex.what();
      }
    }
  }

  for (const auto& t : sh.thresholds) {
    if (!t) continue;
    for (const auto& e : sh.epsilons) {
      RunRecord& rec = out[cell_key(e, t)];
      const RunRecord& base = out[cell_key(e, std::nullopt)];
      if (!rec.ok || !base.ok || base.vd.vd == 0.0) continue;
      rec.vd_reduction_pct =
          100.0 * (std::abs(base.vd.vd) - std::abs(rec.vd.vd)) / std::abs(base.vd.vd);
    }
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::string cell_key(std::optional<double> epsilon, std::optional<double> threshold) {
  return "eps-" + (epsilon ? format_number(*epsilon) : std::string("none")) + "_T-" +
         (threshold ? format_number(*threshold) : std::string("none"));
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (const double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (const double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

nlohmann::json RunRecord::to_json() const {
  return {{"trial", trial},
          {"seed", seed},
          {"ok", ok},
          {"error", error},
          {"train_size", train_size},
          {"train_accuracy", train_accuracy},
          {"test_accuracy", test_accuracy},
          {"precision", optional_json(precision)},
          {"recall", recall},
          {"vd", ok ? vd.to_json() : nlohmann::json(nullptr)},
          {"vd_reduction_pct", optional_json(vd_reduction_pct)},
          {"fairpick", fairpick}};
}

RunRecord RunRecord::from_json(const nlohmann::json& j) {
  RunRecord r;
  r.trial = j.at("trial").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.ok = j.at("ok").get<bool>();
  r.error = j.at("error").get<std::string>();
  r.train_size = j.at("train_size").get<std::size_t>();
  r.train_accuracy = j.at("train_accuracy").get<double>();
  r.test_accuracy = j.at("test_accuracy").get<double>();
  r.precision = optional_from(j.at("precision"));
  r.recall = j.at("recall").get<double>();
  if (!j.at("vd").is_null()) r.vd = metrics::VdReport::from_json(j.at("vd"));
  r.vd_reduction_pct = optional_from(j.at("vd_reduction_pct"));
  r.fairpick = j.at("fairpick");
  return r;
}

void aggregate(Cell& cell) {
  std::map<std::string, std::vector<double>> values;
  cell.failed = 0;
  cell.no_positive_runs = 0;
  cell.baseline_zero_runs = 0;
  cell.mean_bin_recalls = {};
  std::size_t ok = 0;
  for (const RunRecord& r : cell.runs) {
    if (!r.ok) {
      ++cell.failed;
      continue;
    }
    ++ok;
    values["train_accuracy"].push_back(r.train_accuracy);
    values["test_accuracy"].push_back(r.test_accuracy);
    if (r.precision) {
      values["precision"].push_back(*r.precision);
    } else {
      ++cell.no_positive_runs;
    }
    values["recall"].push_back(r.recall);
    values["vd"].push_back(r.vd.vd);
    values["abs_vd"].push_back(std::abs(r.vd.vd));
    if (r.vd.vd_dp) values["vd_dp"].push_back(*r.vd.vd_dp);
    if (r.vd.change_c) {
      values["change_c"].push_back(*r.vd.change_c);
    } else if (cell.epsilon) {
      ++cell.baseline_zero_runs;
    }
    if (r.vd_reduction_pct) values["vd_reduction_pct"].push_back(*r.vd_reduction_pct);
    values["train_size"].push_back(static_cast<double>(r.train_size));
    for (std::size_t b = 0; b < metrics::kBins; ++b) {
      for (std::size_t g = 0; g < 2; ++g) cell.mean_bin_recalls[b][g] += r.vd.bin_recalls[b][g];
    }
  }
  if (ok > 0) {
    for (auto& row : cell.mean_bin_recalls) {
      for (double& v : row) v /= static_cast<double>(ok);
    }
  }
  cell.metrics.clear();
  for (const auto& [name, v] : values) cell.metrics[name] = summarize(v);
  cell.valid = cell.failed * 5 <= cell.runs.size();
}

nlohmann::json Cell::to_json() const {
  nlohmann::json runs_json = nlohmann::json::array();
  for (const RunRecord& r : runs) runs_json.push_back(r.to_json());
  nlohmann::json metrics_json = nlohmann::json::object();
  for (const auto& [name, s] : metrics) {
    metrics_json[name] = {{"mean", s.mean}, {"std", s.stddev}, {"count", s.count}};
  }
  return {{"key", key},
          {"epsilon", optional_json(epsilon)},
          {"threshold", optional_json(threshold)},
          {"failed", failed},
          {"valid", valid},
          {"no_positive_runs", no_positive_runs},
          {"baseline_zero_runs", baseline_zero_runs},
          {"metrics", std::move(metrics_json)},
          {"mean_bin_recalls", bins_json(mean_bin_recalls)},
          {"runs", std::move(runs_json)}};
}

Cell Cell::from_json(const nlohmann::json& j) {
  Cell c;
  c.key = j.at("key").get<std::string>();
  c.epsilon = optional_from(j.at("epsilon"));
  c.threshold = optional_from(j.at("threshold"));
  c.failed = j.at("failed").get<std::size_t>();
  c.valid = j.at("valid").get<bool>();
  c.no_positive_runs = j.at("no_positive_runs").get<std::size_t>();
  c.baseline_zero_runs = j.at("baseline_zero_runs").get<std::size_t>();
  for (const auto& [name, s] : j.at("metrics").items()) {
    c.metrics[name] = Summary{s.at("mean").get<double>(), s.at("std").get<double>(),
                              s.at("count").get<std::size_t>()};
  }
  const auto& bins = j.at("mean_bin_recalls");
  if (bins.size() != metrics::kBins) throw ParseError("cell needs 10 bins", 0);
  for (std::size_t b = 0; b < metrics::kBins; ++b) {
    c.mean_bin_recalls[b][0] = bins[b].at("protected").get<double>();
    c.mean_bin_recalls[b][1] = bins[b].at("unprotected").get<double>();
  }
  for (const auto& r : j.at("runs")) c.runs.push_back(RunRecord::from_json(r));
  return c;
}

nlohmann::json Report::to_json() const {
  nlohmann::json cells_json = nlohmann::json::object();
  for (const auto& [key, cell] : cells) cells_json[key] = cell.to_json();
  return {{"config", config}, {"cells", std::move(cells_json)}};
}

Report Report::from_json(const nlohmann::json& j) {
  Report r;
  r.config = j.at("config");
  for (const auto& [key, cell] : j.at("cells").items()) r.cells[key] = Cell::from_json(cell);
  return r;
}

Report run_experiment(const config::ExperimentConfig& cfg) {
  cfg.validate();
  const data::Schema schema = data::Schema::load(cfg.schema);
  const data::Dataset data = data::load_csv(cfg.dataset, schema);
  schema.group_map(cfg.protected_attribute);  // fail early on a bad attribute

  Shared sh{cfg, data, {std::nullopt}, {std::nullopt}};
  for (const double e : cfg.epsilons) sh.epsilons.emplace_back(e);
  if (cfg.fairpick) {
    for (const double t : cfg.thresholds) sh.thresholds.emplace_back(t);
  }

  std::vector<std::map<std::string, RunRecord>> trials(static_cast<std::size_t>(cfg.trials));
#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.jobs)
  for (int trial = 0; trial < cfg.trials; ++trial) {
    trials[static_cast<std::size_t>(trial)] = run_trial(sh, trial);
  }

  Report report;
  report.config = cfg.to_json();
  for (const auto& t : sh.thresholds) {
    for (const auto& e : sh.epsilons) {
      Cell cell;
      cell.key = cell_key(e, t);
      cell.epsilon = e;
      cell.threshold = t;
      for (auto& trial : trials) cell.runs.push_back(std::move(trial.at(cell.key)));
      aggregate(cell);
      report.cells.emplace(cell.key, std::move(cell));
    }
  }
  return report;
}

void emit_report(const Report& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_json(dir / "report.json", wrap("experiment_report", report.to_json()));

  std::string csv = "cell,epsilon,threshold,runs,failed,valid,no_positive_runs";
  for (const std::string& m : kMetricNames) csv += "," + m + "_mean," + m + "_std";
  csv += "\n";
  for (const auto& [key, cell] : report.cells) {
    csv += key + "," + (cell.epsilon ? format_number(*cell.epsilon) : "none") + "," +
           (cell.threshold ? format_number(*cell.threshold) : "none") + "," +
           std::to_string(cell.runs.size()) + "," + std::to_string(cell.failed) + "," +
           (cell.valid ? "true" : "false") + "," + std::to_string(cell.no_positive_runs);
    for (const std::string& m : kMetricNames) {
      const auto it = cell.metrics.find(m);
      if (it == cell.metrics.end() || it->second.count == 0) {
        csv += ",,";
      } else {
        csv += "," + format_number(it->second.mean) + "," + format_number(it->second.stddev);
      }
    }
    csv += "\n";
  }
  write_text(dir / "summary.csv", csv);

  for (const auto& [key, cell] : report.cells) {
    metrics::VdReport bins;
    bins.bin_recalls = cell.mean_bin_recalls;
    std::ostringstream out;
    bins.write_bins_csv(out);
    write_text(dir / ("bins_" + key + ".csv"), out.str());
    if (!cell.threshold) continue;
    nlohmann::json plans = nlohmann::json::array();
    for (const RunRecord& r : cell.runs) {
      plans.push_back({{"trial", r.trial}, {"ok", r.ok}, {"classes", r.fairpick}});
    }
    write_json(dir / ("plans_" + key + ".json"), wrap("fairpick_plans", plans));
  }
}

}  // namespace vdaudit::experiment
