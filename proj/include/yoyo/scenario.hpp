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

#pragma once

// Scenario files (YAML, schema_version 1). Every section is optional and
// falls back to the built-in defaults; unknown keys are errors so typos do
// not silently run the default cluster.
//
//   schema_version: 1
//   name: YoYoK8s
//   duration: 90m          # default: cycles * (t_on + t_off) for yoyo, 90m otherwise
//   seed: 1
//   cluster:  { u_target: 50, pods_per_node: 3, i_p_down: 5m, ... }
//   service:  { base_latency_ms: 20, ... }
//   pricing:  { node_rate_per_hour: 0.0475, min_billing: 60s, mgmt_fee_per_hour: 0.10 }
//   workload: { kind: yoyo, base_rate: 30, power: 20, t_on: 10m, t_off: 20m,
//               cycles: 3, ramp_up: 0, jitter: none }
//
// jitter is `none`, `{constant: <delay seconds>}` or `{random: [lo, hi]}`.

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <set>
#include <stdexcept>
#include <string>

#include <yaml-cpp/yaml.h>

#include "yoyo/damage.hpp"
#include "yoyo/dataset.hpp"
#include "yoyo/simulation.hpp"
#include "yoyo/workload.hpp"

namespace yoyo {

inline constexpr int kScenarioSchemaVersion = 1;

struct Scenario {
  std::string name = "scenario";
  ClusterConfig cluster;
  ServiceModelConfig service;
  PricingConfig pricing;
  WorkloadSchedule schedule;
  Seconds duration = 0;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir;  // empty: use the CLI's --out

  void validate() const {
    if (name.empty()) throw std::invalid_argument("scenario: name must not be empty");
    cluster.validate();
    service.validate_against(cluster);
    pricing.validate();
    schedule.validate();
    if (duration <= 0) throw std::invalid_argument("scenario: duration must be > 0");
    if (schedule.kind == WorkloadKind::YoYo && duration < schedule.period())
      throw std::invalid_argument("scenario: duration must cover at least one full cycle");
  }
};

inline Seconds default_duration(const WorkloadSchedule& s) {
  return s.kind == WorkloadKind::YoYo ? s.attack_end() : Seconds{5400};
}

/// "file:line: message". Line is 1-based; 0 when no position is known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& file, int line, const std::string& message)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

class ScenarioReader {
 public:
  explicit ScenarioReader(std::string file) : file_(std::move(file)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    throw ConfigError(file_, at.Mark().line >= 0 ? at.Mark().line + 1 : 0, msg);
  }

  void expect_map(const YAML::Node& n, const std::string& what) const {
    if (!n.IsMap()) fail(n, what + " must be a mapping");
  }

  void check_keys(const YAML::Node& map, std::initializer_list<const char*> allowed,
                  const std::string& section) const {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!ok.contains(key)) fail(kv.first, "unknown key '" + key + "' in " + section);
    }
  }

  template <typename T>
  T scalar(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar()) fail(n, key + ": expected a scalar");
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, key + ": cannot read '" + n.Scalar() + "'");
    }
  }

  double number(const YAML::Node& n, const std::string& key) const {
    return scalar<double>(n, key);
  }
  int integer(const YAML::Node& n, const std::string& key) const { return scalar<int>(n, key); }

  Seconds duration(const YAML::Node& n, const std::string& key) const {
    const auto text = scalar<std::string>(n, key);
    try {
      return parse_duration(text);
    } catch (const std::invalid_argument& e) {
      fail(n, key + ": " + e.what());
    }
  }

  void read_cluster(const YAML::Node& n, ClusterConfig& c) const {
    expect_map(n, "cluster");
    check_keys(n,
               {"u_target", "pods_per_node", "initial_pods", "initial_nodes", "min_nodes",
                "max_nodes", "i_p_up", "i_p_down", "i_n_up", "i_n_down", "w_p_up", "w_p_down",
                "w_n_up", "w_n_down", "pod_capacity_rps", "pod_burst_limit", "hpa_tolerance"},
               "cluster");
    for (const auto& kv : n) {
      const auto key = kv.first.as<std::string>();
      const YAML::Node& v = kv.second;
      if (key == "u_target") c.u_target = number(v, key);
      else if (key == "pods_per_node") c.pods_per_node = integer(v, key);
      else if (key == "initial_pods") c.initial_pods = integer(v, key);
      else if (key == "initial_nodes") c.initial_nodes = integer(v, key);
      else if (key == "min_nodes") c.min_nodes = integer(v, key);
      else if (key == "max_nodes") c.max_nodes = integer(v, key);
      else if (key == "i_p_up") c.i_p_up = duration(v, key);
      else if (key == "i_p_down") c.i_p_down = duration(v, key);
      else if (key == "i_n_up") c.i_n_up = duration(v, key);
      else if (key == "i_n_down") c.i_n_down = duration(v, key);
      else if (key == "w_p_up") c.w_p_up = duration(v, key);
      else if (key == "w_p_down") c.w_p_down = duration(v, key);
      else if (key == "w_n_up") c.w_n_up = duration(v, key);
      else if (key == "w_n_down") c.w_n_down = duration(v, key);
      else if (key == "pod_capacity_rps") c.pod_capacity_rps = number(v, key);
      else if (key == "pod_burst_limit") c.pod_burst_limit = number(v, key);
      else if (key == "hpa_tolerance") c.hpa_tolerance = number(v, key);
    }
  }

  void read_service(const YAML::Node& n, ServiceModelConfig& s) const {
    expect_map(n, "service");
    check_keys(n,
               {"base_latency_ms", "knee_utilization", "latency_slope_ms",
                "saturation_latency_ms", "model_rescheduling_errors"},
               "service");
    for (const auto& kv : n) {
      const auto key = kv.first.as<std::string>();
      const YAML::Node& v = kv.second;
      if (key == "base_latency_ms") s.base_latency_ms = number(v, key);
      else if (key == "knee_utilization") s.knee_utilization = number(v, key);
      else if (key == "latency_slope_ms") s.latency_slope_ms = number(v, key);
      else if (key == "saturation_latency_ms") s.saturation_latency_ms = number(v, key);
      else if (key == "model_rescheduling_errors") s.model_rescheduling_errors = scalar<bool>(v, key);
    }
  }

  void read_pricing(const YAML::Node& n, PricingConfig& p) const {
    expect_map(n, "pricing");
    check_keys(n, {"node_rate_per_hour", "min_billing", "mgmt_fee_per_hour"}, "pricing");
    for (const auto& kv : n) {
      const auto key = kv.first.as<std::string>();
      const YAML::Node& v = kv.second;
      if (key == "node_rate_per_hour") p.node_rate = number(v, key) / 3600.0;
      else if (key == "min_billing") p.min_billing = duration(v, key);
      else if (key == "mgmt_fee_per_hour") p.mgmt_fee = number(v, key);
    }
  }

  Jitter read_jitter(const YAML::Node& n) const {
    if (n.IsScalar()) {
      if (n.Scalar() == "none") return NoJitter{};
      fail(n, "jitter: expected none, {constant: d} or {random: [lo, hi]}");
    }
    if (!n.IsMap() || n.size() != 1)
      fail(n, "jitter: expected none, {constant: d} or {random: [lo, hi]}");
    const auto kv = *n.begin();
    const auto key = kv.first.as<std::string>();
    if (key == "constant") return ConstantJitter{number(kv.second, "jitter.constant")};
    if (key == "random") {
      if (!kv.second.IsSequence() || kv.second.size() != 2)
        fail(kv.second, "jitter.random: expected [lo, hi]");
      return RandomJitter{number(kv.second[0], "jitter.random"),
                          number(kv.second[1], "jitter.random")};
    }
    fail(kv.first, "jitter: unknown kind '" + key + "'");
  }

  void read_workload(const YAML::Node& n, WorkloadSchedule& w) const {
    expect_map(n, "workload");
    check_keys(n, {"kind", "base_rate", "power", "t_on", "t_off", "cycles", "ramp_up", "jitter"},
               "workload");
    for (const auto& kv : n) {
      const auto key = kv.first.as<std::string>();
      const YAML::Node& v = kv.second;
      if (key == "kind") {
        const auto kind = scalar<std::string>(v, key);
        if (kind == "steady") w.kind = WorkloadKind::Steady;
        else if (kind == "flat") w.kind = WorkloadKind::FlatDdos;
        else if (kind == "yoyo") w.kind = WorkloadKind::YoYo;
        else fail(v, "kind: expected steady, flat or yoyo, got '" + kind + "'");
      } else if (key == "base_rate") w.base_rate = number(v, key);
      else if (key == "power") w.power = number(v, key);
      else if (key == "t_on") w.t_on = duration(v, key);
      else if (key == "t_off") w.t_off = duration(v, key);
      else if (key == "cycles") w.cycles = integer(v, key);
      else if (key == "ramp_up") w.ramp_up = duration(v, key);
      else if (key == "jitter") w.jitter = read_jitter(v);
    }
  }

  Scenario read(const YAML::Node& root) const {
    if (!root.IsDefined() || root.IsNull()) throw ConfigError(file_, 1, "empty scenario file");
    expect_map(root, "scenario");
    check_keys(root,
               {"schema_version", "name", "duration", "seed", "output_dir", "cluster", "service",
                "pricing", "workload"},
               "scenario");
    const YAML::Node version = root["schema_version"];
    if (!version) throw ConfigError(file_, 1, "missing schema_version");
    if (integer(version, "schema_version") != kScenarioSchemaVersion)
      fail(version, "unsupported schema_version " + version.Scalar() + " (expected " +
                        std::to_string(kScenarioSchemaVersion) + ")");

    Scenario s;
    if (auto n = root["name"]) s.name = scalar<std::string>(n, "name");
    if (auto n = root["seed"]) s.seed = scalar<std::uint64_t>(n, "seed");
    if (auto n = root["output_dir"]) s.output_dir = scalar<std::string>(n, "output_dir");
    if (auto n = root["cluster"]) read_cluster(n, s.cluster);
    if (auto n = root["service"]) read_service(n, s.service);
    if (auto n = root["pricing"]) read_pricing(n, s.pricing);
    if (auto n = root["workload"]) read_workload(n, s.schedule);
    s.duration = root["duration"] ? duration(root["duration"], "duration")
                                  : default_duration(s.schedule);
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      // Point at the section that owns the bad value.
      const std::string what = e.what();
      const char* section = what.starts_with("cluster")   ? "cluster"
                            : what.starts_with("service") ? "service"
                            : what.starts_with("pricing") ? "pricing"
                            : what.starts_with("workload") ? "workload"
                                                            : "duration";
      const YAML::Node at = root[section];
      if (at) fail(at, what);
      throw ConfigError(file_, 1, what);
    }
    return s;
  }

 private:
  std::string file_;
};

}  // namespace detail

/// Parses scenario text; `source` names the file in error messages.
inline Scenario parse_scenario(const std::string& text, const std::string& source = "<string>") {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source, e.mark.line + 1, e.msg);
  }
  return detail::ScenarioReader(source).read(root);
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(path.string(), 0, e.what());
  }
  return parse_scenario(text, path.string());
}

/// The three headline runs: flat k=20, YoYo k=20 at 10m/20m, and YoYo
/// against a VM group (one pod per node).
inline Scenario builtin_scenario(const std::string& which) {
  Scenario s;
  s.schedule.power = 20;
  s.schedule.t_on = 600;
  s.schedule.t_off = 1200;
  s.schedule.cycles = 3;
  if (which == "flat") {
    s.name = "ClassicDDoS";
    s.schedule.kind = WorkloadKind::FlatDdos;
  } else if (which == "yoyo") {
    s.name = "YoYoK8s";
    s.schedule.kind = WorkloadKind::YoYo;
  } else if (which == "yoyo-vm") {
    s.name = "YoYoVMGroup";
    s.schedule.kind = WorkloadKind::YoYo;
    s.cluster.pods_per_node = 1;
    s.cluster.initial_nodes = 3;
    s.cluster.max_nodes = 64;
  } else {
    throw std::invalid_argument("unknown built-in scenario '" + which + "'");
  }
  s.duration = 3 * s.schedule.period();
  return s;
}

// ---------------------------------------------------------------------------
// Dataset grids. Same dialect; any omitted list keeps the built-in default.
//
//   schema_version: 1
//   base_rate: 30
//   regular: { ramp_ups: [30s, 60s, 2m], powers: [1, 3, 5, 7],
//              timers: [constant, random], duration: 90m }
//   attack:  { ramp_ups: [...], timings: [[7m, 14m], [10m, 20m]],
//              powers: [15, 20, 30], timers: [constant], cycles: 3 }

namespace detail {

class GridReader : public ScenarioReader {
 public:
  using ScenarioReader::ScenarioReader;

  template <typename T, typename Fn>
  std::vector<T> list(const YAML::Node& n, const std::string& key, Fn item) const {
    if (!n.IsSequence() || n.size() == 0) fail(n, key + ": expected a non-empty list");
    std::vector<T> out;
    for (const auto& v : n) out.push_back(item(v));
    return out;
  }

  std::vector<Seconds> durations(const YAML::Node& n, const std::string& key) const {
    return list<Seconds>(n, key, [&](const YAML::Node& v) { return duration(v, key); });
  }
  std::vector<double> numbers(const YAML::Node& n, const std::string& key) const {
    return list<double>(n, key, [&](const YAML::Node& v) { return number(v, key); });
  }
  std::vector<TimerKind> timers(const YAML::Node& n, const std::string& key) const {
    return list<TimerKind>(n, key, [&](const YAML::Node& v) {
      const auto t = scalar<std::string>(v, key);
      if (t == "constant") return TimerKind::Constant;
      if (t == "random") return TimerKind::Random;
      fail(v, key + ": expected constant or random, got '" + t + "'");
    });
  }

  DatasetGrid read(const YAML::Node& root) const {
    if (!root.IsDefined() || root.IsNull()) return {};
    expect_map(root, "grid");
    check_keys(root, {"schema_version", "base_rate", "regular", "attack"}, "grid");
    if (auto v = root["schema_version"]; !v || integer(v, "schema_version") != kScenarioSchemaVersion)
      fail(v ? v : root, "grid needs schema_version: " + std::to_string(kScenarioSchemaVersion));

    DatasetGrid g;
    if (auto n = root["base_rate"]) g.base_rate = number(n, "base_rate");
    if (auto reg = root["regular"]) {
      expect_map(reg, "regular");
      check_keys(reg, {"ramp_ups", "powers", "timers", "duration"}, "regular");
      if (auto n = reg["ramp_ups"]) g.regular_ramp_ups = durations(n, "ramp_ups");
      if (auto n = reg["powers"]) g.regular_powers = numbers(n, "powers");
      if (auto n = reg["timers"]) g.regular_timers = timers(n, "timers");
      if (auto n = reg["duration"]) g.regular_duration = duration(n, "duration");
    }
    if (auto att = root["attack"]) {
      expect_map(att, "attack");
      check_keys(att, {"ramp_ups", "timings", "powers", "timers", "cycles"}, "attack");
      if (auto n = att["ramp_ups"]) g.attack_ramp_ups = durations(n, "ramp_ups");
      if (auto n = att["powers"]) g.attack_powers = numbers(n, "powers");
      if (auto n = att["timers"]) g.attack_timers = timers(n, "timers");
      if (auto n = att["cycles"]) g.attack_cycles = integer(n, "cycles");
      if (auto n = att["timings"]) {
        g.attack_timings = list<OnOff>(n, "timings", [&](const YAML::Node& v) {
          if (!v.IsSequence() || v.size() != 2) fail(v, "timings: expected [t_on, t_off]");
          return OnOff{duration(v[0], "t_on"), duration(v[1], "t_off")};
        });
      }
    }
    if (g.attack_cycles < 3) fail(root, "attack.cycles must be >= 3 (features need three cycles)");
    if (g.regular_duration <= 0) fail(root, "regular.duration must be > 0");
    for (const auto& cell : enumerate_cells(g)) {
      try {
        cell.schedule.validate();
      } catch (const std::invalid_argument& e) {
        fail(root, std::string(e.what()) + " (cell: " + cell.tag + ")");
      }
    }
    return g;
  }
};

}  // namespace detail

inline DatasetGrid parse_grid(const std::string& text, const std::string& source = "<string>") {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source, e.mark.line + 1, e.msg);
  }
  return detail::GridReader(source).read(root);
}

inline DatasetGrid load_grid(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(path.string(), 0, e.what());
  }
  return parse_grid(text, path.string());
}

}  // namespace yoyo
