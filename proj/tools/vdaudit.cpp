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

// Command line front end. Every subcommand reads an optional config file
// and then applies flag overrides on top of it.
//
// Exit status: 0 on success, 1 for a configuration or usage error, 2 when
// the pipeline itself fails.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "vdaudit/config.hpp"
#include "vdaudit/dataset.hpp"
#include "vdaudit/error.hpp"
#include "vdaudit/experiment.hpp"
#include "vdaudit/fairpick.hpp"
#include "vdaudit/id3.hpp"
#include "vdaudit/mia.hpp"
#include "vdaudit/random.hpp"
#include "vdaudit/serialize.hpp"

namespace {

using vdaudit::config::ExperimentConfig;

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Overrides {
  std::string config;
  std::string dataset;
  std::string schema;
  std::string protected_attribute;
  std::optional<int> depth;
  std::string epsilon;
  std::string fairpick_t;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string out;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Key/value config file");
  cmd->add_option("--dataset", o.dataset, "CSV dataset");
  cmd->add_option("--schema", o.schema, "JSON schema of the dataset");
  cmd->add_option("--protected", o.protected_attribute, "Protected attribute column");
  cmd->add_option("--depth", o.depth, "Decision tree depth limit");
  cmd->add_option("--epsilon", o.epsilon, "Privacy budgets, e.g. 0.1,1,10, or none");
  cmd->add_option("--fairpick-t", o.fairpick_t, "FairPick thresholds, e.g. 0.4,0.8, or none");
  cmd->add_option("--trials", o.trials, "Repetitions per cell");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--jobs", o.jobs, "Worker threads");
  cmd->add_option("--out", o.out, "Output directory");
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig cfg;
  if (!o.config.empty()) cfg = vdaudit::config::load_config(o.config);
  if (!o.dataset.empty()) cfg.dataset = o.dataset;
  if (!o.schema.empty()) cfg.schema = o.schema;
  if (!o.protected_attribute.empty()) cfg.protected_attribute = o.protected_attribute;
  if (o.depth) cfg.depth = *o.depth;
  if (!o.epsilon.empty()) cfg.epsilons = vdaudit::config::parse_number_list(o.epsilon);
  if (!o.fairpick_t.empty()) {
    cfg.thresholds = vdaudit::config::parse_number_list(o.fairpick_t);
    cfg.fairpick = !cfg.thresholds.empty();
  }
  if (o.trials) cfg.trials = *o.trials;
  if (o.seed) cfg.seed = *o.seed;
  if (o.jobs) cfg.jobs = *o.jobs;
  if (!o.out.empty()) cfg.out = o.out;
  cfg.validate();
  return cfg;
}

// Subcommands that train a single target take at most one budget.
std::optional<double> single_epsilon(const ExperimentConfig& cfg) {
  if (cfg.epsilons.size() > 1) {
    throw vdaudit::ConfigError("this subcommand takes one --epsilon value or none");
  }
  if (cfg.epsilons.empty()) return std::nullopt;
  return cfg.epsilons.front();
}

struct Prepared {
  vdaudit::data::TrainTest tt;
  vdaudit::data::SplitSpec spec;
  vdaudit::id3::DecisionTree tree;
};

Prepared prepare_target(const ExperimentConfig& cfg, std::optional<double> epsilon) {
  const vdaudit::data::Schema schema = vdaudit::data::Schema::load(cfg.schema);
  const vdaudit::data::Dataset data = vdaudit::data::load_csv(cfg.dataset, schema);
  const vdaudit::data::SplitSpec spec{cfg.train_fraction, cfg.attack_fraction, cfg.eval_fraction,
                                      vdaudit::derive_seed(cfg.seed, "split")};
  vdaudit::data::TrainTest tt = vdaudit::data::split(data, spec);
  vdaudit::id3::DecisionTree tree =
      epsilon ? vdaudit::id3::train_dp_id3(tt.train, cfg.depth, {*epsilon, true},
                                           vdaudit::derive_seed(cfg.seed, "dp"))
              : vdaudit::id3::train_id3(tt.train, cfg.depth);
  return {std::move(tt), spec, std::move(tree)};
}

int cmd_train(const ExperimentConfig& cfg) {
  const Prepared p = prepare_target(cfg, single_epsilon(cfg));
  std::filesystem::create_directories(cfg.out);
  vdaudit::write_json(cfg.out / "tree.json", p.tree.to_json());
  const nlohmann::json summary = {{"train_size", p.tt.train.size()},
                                  {"test_size", p.tt.test.size()},
                                  {"depth", p.tree.depth()},
                                  {"leaves", p.tree.leaf_count()},
                                  {"train_accuracy", vdaudit::id3::accuracy(p.tree, p.tt.train)},
                                  {"test_accuracy", vdaudit::id3::accuracy(p.tree, p.tt.test)}};
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_attack(const ExperimentConfig& cfg) {
  const Prepared p = prepare_target(cfg, single_epsilon(cfg));
  const vdaudit::data::AttackData ad = vdaudit::data::sample_attack_data(p.tt.train, p.tt.test, p.spec);
  const vdaudit::mia::AttackModel am = vdaudit::mia::train_attack_model(
      vdaudit::mia::build_attack_training_set(p.tree, ad.attack_members, ad.attack_nonmembers),
      cfg.attack, vdaudit::derive_seed(cfg.seed, "attack"));
  const vdaudit::mia::MiaResult res =
      vdaudit::mia::evaluate_mia(am, p.tree, ad.eval_members, ad.eval_nonmembers);
  std::filesystem::create_directories(cfg.out);
  vdaudit::write_json(cfg.out / "tree.json", p.tree.to_json());
  vdaudit::write_json(cfg.out / "attack_model.json", am.to_json());
  const nlohmann::json summary = {
      {"precision", res.precision ? nlohmann::json(*res.precision) : nlohmann::json("no-positives")},
      {"recall", res.recall},
      {"true_positives", res.true_positives},
      {"false_positives", res.false_positives},
      {"false_negatives", res.false_negatives},
      {"true_negatives", res.true_negatives}};
  vdaudit::write_json(cfg.out / "mia.json", summary);
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_audit(ExperimentConfig cfg) {
  const std::optional<double> epsilon = single_epsilon(cfg);
  cfg.trials = 1;
  cfg.fairpick = false;
  const vdaudit::experiment::Report report = vdaudit::experiment::run_experiment(cfg);
  const auto& cell = report.cells.at(vdaudit::experiment::cell_key(epsilon, std::nullopt));
  const vdaudit::experiment::RunRecord& run = cell.runs.front();
  if (!run.ok) throw vdaudit::Error("audit failed: " + run.error);
  std::filesystem::create_directories(cfg.out);
  vdaudit::write_json(cfg.out / "vd_report.json", vdaudit::wrap("vd_report", run.vd.to_json()));
  std::ofstream bins(cfg.out / "bins.csv");
  run.vd.write_bins_csv(bins);
  std::cout << run.vd.to_json().dump(2) << '\n';
  return 0;
}

int cmd_mitigate(const ExperimentConfig& cfg) {
  if (cfg.thresholds.size() != 1 || !cfg.fairpick) {
    throw vdaudit::ConfigError("mitigate takes exactly one --fairpick-t value");
  }
  const vdaudit::data::Schema schema = vdaudit::data::Schema::load(cfg.schema);
  const vdaudit::data::Dataset data = vdaudit::data::load_csv(cfg.dataset, schema);
  vdaudit::fairpick::SolverOptions options;
  options.refine_passes = cfg.refine_passes;
  const vdaudit::fairpick::FairPickResult r = vdaudit::fairpick::fairpick(
      data, vdaudit::data::binarize_group(data, cfg.protected_attribute), cfg.thresholds.front(),
      cfg.min_per_cluster, cfg.seed, options);
  std::filesystem::create_directories(cfg.out);
  r.data.write_csv(cfg.out / "mitigated.csv");
  vdaudit::write_json(cfg.out / "plan.json", vdaudit::wrap("fairpick_plans", r.diagnostics()));
  std::cout << "kept " << r.data.size() << " of " << data.size() << " records\n";
  return 0;
}

int cmd_experiment(const ExperimentConfig& cfg) {
  const vdaudit::experiment::Report report = vdaudit::experiment::run_experiment(cfg);
  vdaudit::experiment::emit_report(report, cfg.out);
  for (const auto& [key, cell] : report.cells) {
    std::cout << key << ": " << (cell.runs.size() - cell.failed) << "/" << cell.runs.size()
              << " runs ok" << (cell.valid ? "" : " (invalid)") << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vulnerability disparity audit for membership inference on decision trees"};
  app.require_subcommand(1);
  Overrides o;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {{"train", "Train a (private) ID3 target and report its accuracy"},
                      {"attack", "Train the target and the attack, report precision and recall"},
                      {"audit", "One VD report with per-bin recalls"},
                      {"mitigate", "Apply FairPick to a dataset"},
                      {"experiment", "Full grid over budgets, thresholds and trials"}};
  for (const Sub& s : subs) add_common_flags(app.add_subcommand(s.name, s.help), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  ExperimentConfig cfg;
  try {
    cfg = resolve(o);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "train") return cmd_train(cfg);
    if (name == "attack") return cmd_attack(cfg);
    if (name == "audit") return cmd_audit(cfg);
    if (name == "mitigate") return cmd_mitigate(cfg);
    return cmd_experiment(cfg);
  } catch (const vdaudit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
