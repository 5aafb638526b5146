// Copyright 2026 The yoyosim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// yoyosim: scenario runner, damage reports and the detector pipeline.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "yoyo/scenario.hpp"
#include "yoyo/yoyo.hpp"

namespace fs = std::filesystem;
using namespace yoyo;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  fs::path out = ".";
  std::string tick = "1s";
};

// Stream used to derive the train/test split from the dataset seed.
constexpr std::uint64_t kSplitStream = 0x73706c6974ULL;

std::string to_text(const std::function<void(std::ostream&)>& write) {
  std::ostringstream s;
  write(s);
  return s.str();
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

/// A scenario file, or one of the built-ins as @flat, @yoyo, @yoyo-vm.
Scenario resolve_scenario(const std::string& spec, const Globals& g) {
  Scenario s = spec.starts_with("@") ? builtin_scenario(spec.substr(1)) : load_scenario(spec);
  if (g.seed) s.seed = *g.seed;
  return s;
}

fs::path output_dir(const Scenario& s, const Globals& g) {
  if (s.output_dir.empty()) return g.out;
  return s.output_dir.is_absolute() ? s.output_dir : g.out / s.output_dir;
}

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

int cmd_simulate(const Globals& g, const std::string& scenario_spec, const std::string& attack) {
  Scenario s;
  if (!attack.empty()) {
    s.name = "attack";
    s.schedule = parse_attack_shorthand(attack);
    s.duration = s.schedule.attack_end();
    if (g.seed) s.seed = *g.seed;
    s.validate();
  } else {
    s = resolve_scenario(scenario_spec, g);
  }
  const Triplet runs = run_triplet(s.cluster, s.service, s.schedule, s.duration, s.seed);
  const DamageReport report = assess_damage(runs, s.pricing);

  const fs::path dir = output_dir(s, g);
  fs::create_directories(dir);
  const Trace& trace = runs.attack.trace;
  write_file_atomic(dir / (s.name + ".trace.csv"),
                    to_text([&](std::ostream& o) { write_trace_csv(o, trace); }));
  write_file_atomic(dir / (s.name + ".trace.jsonl"),
                    to_text([&](std::ostream& o) { write_trace_jsonl(o, trace); }));
  write_file_atomic(dir / (s.name + ".plot.csv"),
                    to_text([&](std::ostream& o) { write_plot_csv(o, trace, runs.schedule); }));
  write_file_atomic(dir / (s.name + ".actions.csv"),
                    to_text([&](std::ostream& o) { write_actions_csv(o, runs.attack.actions); }));

  nlohmann::ordered_json j;
  j["scenario"] = s.name;
  j["kind"] = to_string(s.schedule.kind);
  j["duration"] = s.duration;
  j["seed"] = s.seed;
  j["report"] = to_json(report);
  write_json(dir / (s.name + ".report.json"), j);

  std::cout << s.name << ": cost=" << format_number(report.cost) << " RD_e=" << cell(report.rd_e)
            << " RD_p=" << cell(report.rd_p) << " potency=" << cell(report.potency)
            << " billed=" << format_number(report.billed_amount) << "\n";
  return 0;
}

int cmd_compare(const Globals& g, std::vector<std::string> specs) {
  if (specs.empty()) specs = {"@flat", "@yoyo"};
  if (specs.size() != 2) throw std::invalid_argument("compare takes exactly two scenarios");
  const Scenario a = resolve_scenario(specs[0], g);
  const Scenario b = resolve_scenario(specs[1], g);
  if (!(a.cluster == b.cluster))
    throw std::invalid_argument("compare: scenarios use different cluster configs");
  if (!(a.service == b.service))
    throw std::invalid_argument("compare: scenarios use different service models");

  std::vector<DamageReport> reports;
  for (const Scenario* s : {&a, &b}) {
    const Triplet runs = run_triplet(s->cluster, s->service, s->schedule, s->duration, s->seed);
    reports.push_back(assess_damage(runs, s->pricing));
  }
  std::ostringstream csv;
  csv << "metric," << a.name << ',' << b.name << '\n';
  csv << "Cost," << format_number(reports[0].cost) << ',' << format_number(reports[1].cost) << '\n';
  csv << "RD_e," << cell(reports[0].rd_e) << ',' << cell(reports[1].rd_e) << '\n';
  csv << "RD_p," << cell(reports[0].rd_p) << ',' << cell(reports[1].rd_p) << '\n';
  csv << "Potency," << cell(reports[0].potency) << ',' << cell(reports[1].potency) << '\n';

  fs::create_directories(g.out);
  write_file_atomic(g.out / "compare.csv", csv.str());
  std::cout << csv.str();
  return 0;
}

int cmd_dataset(const Globals& g, int runs, const std::string& grid_file, double train_fraction) {
  const DatasetGrid grid = grid_file.empty() ? DatasetGrid{} : load_grid(grid_file);
  const std::uint64_t seed = g.seed.value_or(1);
  const LabeledDataset ds = build_dataset(grid, runs, seed);
  const Split split = train_test_split(ds.samples.size(), train_fraction, hash_mix(seed, kSplitStream));

  fs::create_directories(g.out);
  auto save = [&](const char* file, const std::vector<FeatureVector>& samples) {
    write_file_atomic(g.out / file,
                      to_text([&](std::ostream& o) { write_dataset_csv(o, samples); }));
  };
  save("dataset.csv", ds.samples);
  save("train.csv", select(ds.samples, split.train));
  save("test.csv", select(ds.samples, split.test));
  std::cout << "dataset: " << ds.samples.size() << " samples (" << split.train.size()
            << " train, " << split.test.size() << " test) in " << (g.out / "dataset.csv").string()
            << "\n";
  return 0;
}

std::vector<FeatureVector> load_dataset(const fs::path& path) {
  if (!fs::exists(path)) throw std::runtime_error("dataset not found: " + path.string());
  std::istringstream in(read_file(path));
  try {
    return read_dataset_csv(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

int cmd_train(const Globals& g, const std::string& data_file, const GbtHyperParams& params) {
  const fs::path data = data_file.empty() ? g.out / "train.csv" : fs::path(data_file);
  const auto samples = load_dataset(data);
  std::vector<double> losses;
  const BoostedTreeModel model = train(LabeledData::from(samples), params, &losses);
  fs::create_directories(g.out);
  write_json(g.out / "model.json", to_json(model));
  std::cout << "trained " << model.trees.size() << " trees on " << samples.size()
            << " samples, log-loss " << format_number(losses.front()) << " -> "
            << format_number(losses.back()) << "\n";
  return 0;
}

int cmd_eval(const Globals& g, const std::string& model_file, const std::string& data_file) {
  const fs::path model_path = model_file.empty() ? g.out / "model.json" : fs::path(model_file);
  const fs::path data = data_file.empty() ? g.out / "test.csv" : fs::path(data_file);
  if (!fs::exists(model_path)) throw std::runtime_error("model not found: " + model_path.string());
  const BoostedTreeModel model = model_from_json(nlohmann::json::parse(read_file(model_path)));
  const auto samples = load_dataset(data);

  std::vector<Label> predicted, actual;
  for (const auto& s : samples) {
    predicted.push_back(predict(model, s).label);
    actual.push_back(s.label);
  }
  const EvalMetrics m = evaluate(predicted, actual);
  nlohmann::ordered_json j = to_json(m);
  j["samples"] = samples.size();
  nlohmann::ordered_json ranking = nlohmann::ordered_json::array();
  for (const auto& f : feature_importance(model)) {
    ranking.push_back({{"feature", f.name}, {"score", f.score}});
  }
  j["feature_importance"] = ranking;
  fs::create_directories(g.out);
  write_json(g.out / "metrics.json", j);
  std::cout << "accuracy " << format_number(m.accuracy) << " precision "
            << format_number(m.precision) << " recall " << format_number(m.recall) << " f1 "
            << format_number(m.f1) << "\n";
  return 0;
}

int cmd_optimal(const Globals& g, const std::string& scenario_spec) {
  const ClusterConfig cluster =
      scenario_spec.empty() ? ClusterConfig{} : resolve_scenario(scenario_spec, g).cluster;
  cluster.validate();
  nlohmann::ordered_json j{{"optimal_t_on", optimal_t_on(cluster)},
                           {"optimal_t_off", optimal_t_off(cluster)}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"yoyosim: Kubernetes autoscaling under YoYo attacks"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (overrides scenario seeds)");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--tick", g.tick, "Simulation tick; only 1s is supported")->capture_default_str();

  std::string scenario, attack;
  auto* sim = app.add_subcommand("simulate", "Run steady, power-1 and attack runs and report damage");
  auto* sim_scenario =
      sim->add_option("--scenario", scenario, "Scenario file, or @flat / @yoyo / @yoyo-vm");
  auto* sim_attack =
      sim->add_option("--attack", attack, "YoYo shorthand, e.g. \"k=20 on=10m off=20m n=6\"");
  sim_scenario->excludes(sim_attack);
  sim->callback([&] {
    if (scenario.empty() && attack.empty()) throw CLI::RequiredError("--scenario or --attack");
  });

  std::vector<std::string> compare_specs;
  auto* cmp = app.add_subcommand("compare", "Cost, RD_e, RD_p and potency for two scenarios");
  cmp->add_option("scenarios", compare_specs, "Two scenario files (default: @flat @yoyo)");

  int runs = 3;
  std::string grid_file;
  double train_fraction = 0.7;
  auto* ds = app.add_subcommand("dataset", "Simulate the detector dataset grid");
  ds->add_option("--runs", runs, "Runs per grid cell")->capture_default_str()->check(
      CLI::PositiveNumber);
  ds->add_option("--grid", grid_file, "Grid file (default: built-in grid)");
  ds->add_option("--train-fraction", train_fraction, "Training share")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));

  std::string data_file, model_file;
  GbtHyperParams params;
  bool no_balance = false;
  auto* tr = app.add_subcommand("train", "Train the boosted-tree detector");
  tr->add_option("--data", data_file, "Training CSV (default: <out>/train.csv)");
  tr->add_option("--trees", params.num_trees)->capture_default_str();
  tr->add_option("--depth", params.max_depth)->capture_default_str();
  tr->add_option("--eta", params.learning_rate)->capture_default_str();
  tr->add_option("--lambda", params.lambda_l2)->capture_default_str();
  tr->add_option("--gamma", params.gamma_leaf_penalty)->capture_default_str();
  tr->add_option("--min-leaf", params.min_samples_leaf)->capture_default_str();
  tr->add_option("--min-split", params.min_samples_split)->capture_default_str();
  tr->add_flag("--no-balance", no_balance, "Disable class reweighting");

  auto* ev = app.add_subcommand("eval", "Evaluate a model on a dataset");
  ev->add_option("--model", model_file, "Model JSON (default: <out>/model.json)");
  ev->add_option("--data", data_file, "Dataset CSV (default: <out>/test.csv)");

  std::string opt_scenario;
  auto* opt = app.add_subcommand("optimal", "Print optimal t_on / t_off for a cluster config");
  opt->add_option("--scenario", opt_scenario, "Scenario file (default: built-in cluster)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*seed_opt) g.seed = seed;
    if (parse_duration(g.tick) != 1)
      throw std::invalid_argument("--tick " + g.tick + ": only 1s ticks are supported");
    params.class_balancing = !no_balance;

    if (*sim) return cmd_simulate(g, scenario, attack);
    if (*cmp) return cmd_compare(g, compare_specs);
    if (*ds) return cmd_dataset(g, runs, grid_file, train_fraction);
    if (*tr) return cmd_train(g, data_file, params);
    if (*ev) return cmd_eval(g, model_file, data_file);
    if (*opt) return cmd_optimal(g, opt_scenario);
  } catch (const std::exception& e) {
    std::cerr << "yoyosim: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
