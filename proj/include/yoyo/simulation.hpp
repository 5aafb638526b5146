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

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "yoyo/autoscaler.hpp"
#include "yoyo/io.hpp"
#include "yoyo/workload.hpp"

namespace yoyo {

/// Piecewise-linear latency model: flat up to the knee, linear above it,
/// saturated once pods hit their burst cap.
struct ServiceModelConfig {
  double base_latency_ms = 20.0;
  double knee_utilization = 0.7;
  double latency_slope_ms = 80.0 / 0.3;  // rho = 1.0 lands at 5x base
  double saturation_latency_ms = 1000.0;
  bool model_rescheduling_errors = true;

  void validate() const {
    if (!(base_latency_ms > 0.0))
      throw std::invalid_argument("service model: base_latency_ms must be > 0");
    if (!(knee_utilization > 0.0 && knee_utilization < 1.0))
      throw std::invalid_argument("service model: knee_utilization must lie in (0, 1)");
    if (!(latency_slope_ms >= 0.0))
      throw std::invalid_argument("service model: latency_slope_ms must be >= 0");
    if (!(saturation_latency_ms >= base_latency_ms))
      throw std::invalid_argument("service model: saturation_latency_ms must be >= base");
  }

  /// Monotonicity needs the saturated value to sit above the linear branch at the cap.
  void validate_against(const ClusterConfig& cluster) const {
    validate();
    const double at_cap =
        base_latency_ms +
        latency_slope_ms * std::max(0.0, cluster.pod_burst_limit / 100.0 - knee_utilization);
    if (saturation_latency_ms < at_cap)
      throw std::invalid_argument(
          "service model: saturation_latency_ms is below the linear branch at the burst cap");
  }

  friend bool operator==(const ServiceModelConfig&, const ServiceModelConfig&) = default;
};

/// Per-pod relative CPU (percent) when `offered_rate` is split evenly over
/// `ready_pods`. With no ready pods the tick is recorded at the burst cap.
inline double pod_utilization(double offered_rate, int ready_pods, const ClusterConfig& config) {
  if (ready_pods <= 0) return config.pod_burst_limit;
  const double u = 100.0 * (offered_rate / ready_pods) / config.pod_capacity_rps;
  return std::min(config.pod_burst_limit, u);
}

inline double response_time(double utilization, const ServiceModelConfig& model,
                            double burst_limit = 300.0) {
  if (!(utilization >= 0.0)) throw std::invalid_argument("response_time: negative utilization");
  if (utilization >= burst_limit) return model.saturation_latency_ms;
  const double rho = utilization / 100.0;
  if (rho <= model.knee_utilization) return model.base_latency_ms;
  return model.base_latency_ms + model.latency_slope_ms * (rho - model.knee_utilization);
}

struct TraceRow {
  Seconds t = 0;
  double offered_rate = 0.0;
  int ready_pods = 0;
  int total_pods = 0;
  int ready_nodes = 0;
  int total_nodes = 0;
  double avg_relative_cpu = 0.0;
  double response_time = 0.0;  // milliseconds
  std::int64_t errors = 0;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

using Trace = std::vector<TraceRow>;

inline constexpr const char* kTraceColumns =
    "t,offered_rate,ready_pods,total_pods,ready_nodes,total_nodes,avg_relative_cpu,"
    "response_time,errors";

struct RunResult {
  Trace trace;
  std::vector<ScalingAction> actions;
};

/// Runs the cluster for `duration` one-second ticks under `schedule`.
/// `seed` is mixed into the schedule's jitter seed.
inline RunResult run_simulation(const ClusterConfig& cluster, const ServiceModelConfig& service,
                                WorkloadSchedule schedule, Seconds duration, std::uint64_t seed) {
  cluster.validate();
  service.validate_against(cluster);
  schedule.validate();
  if (duration < 1) throw std::invalid_argument("run_simulation: duration must be >= 1 tick");
  schedule.seed = hash_mix(schedule.seed, seed);

  RunResult out;
  out.trace.reserve(static_cast<std::size_t>(duration));
  ClusterState state = make_initial_state(cluster);
  std::vector<double> utilizations;

  for (Seconds t = 0; t < duration; ++t) {
    state.now = t;
    advance_lifecycle(state, cluster);

    TraceRow row;
    row.t = t;
    row.offered_rate = rate_at(schedule, t);
    row.ready_pods = state.ready_pods();
    row.total_pods = state.live_pods();
    row.ready_nodes = state.ready_nodes();
    row.total_nodes = state.total_nodes();
    row.avg_relative_cpu = pod_utilization(row.offered_rate, row.ready_pods, cluster);
    row.response_time = response_time(row.avg_relative_cpu, service, cluster.pod_burst_limit);
    if (row.ready_pods == 0) row.errors = std::llround(row.offered_rate);

    int desired = row.total_pods;
    if (row.ready_pods > 0) {
      utilizations.assign(static_cast<std::size_t>(row.ready_pods), row.avg_relative_cpu);
      desired = target_pod_count(utilizations, cluster.u_target, row.ready_pods,
                                 cluster.hpa_tolerance);
    }

    auto hpa = hpa_step(state, cluster, desired);
    auto ca = ca_step(state, cluster);
    for (const auto& action : ca) {
      if (action.kind == ActionKind::RemoveNode && action.evicted_ready > 0 &&
          service.model_rescheduling_errors && row.ready_pods > 0) {
        row.errors += std::llround(row.offered_rate * action.evicted_ready / row.ready_pods);
      }
    }
    out.actions.insert(out.actions.end(), hpa.begin(), hpa.end());
    out.actions.insert(out.actions.end(), ca.begin(), ca.end());
    out.trace.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Export

inline void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << kTraceColumns << '\n';
  for (const auto& r : trace) {
    out << r.t << ',' << format_number(r.offered_rate) << ',' << r.ready_pods << ','
        << r.total_pods << ',' << r.ready_nodes << ',' << r.total_nodes << ','
        << format_number(r.avg_relative_cpu) << ',' << format_number(r.response_time) << ','
        << r.errors << '\n';
  }
}

inline Trace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceColumns)
    throw std::runtime_error("trace csv: missing or unexpected header");
  Trace trace;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9)
      throw std::runtime_error("trace csv line " + std::to_string(lineno) + ": expected 9 fields");
    TraceRow r;
    r.t = static_cast<Seconds>(parse_number(f[0]));
    r.offered_rate = parse_number(f[1]);
    r.ready_pods = static_cast<int>(parse_number(f[2]));
    r.total_pods = static_cast<int>(parse_number(f[3]));
    r.ready_nodes = static_cast<int>(parse_number(f[4]));
    r.total_nodes = static_cast<int>(parse_number(f[5]));
    r.avg_relative_cpu = parse_number(f[6]);
    r.response_time = parse_number(f[7]);
    r.errors = static_cast<std::int64_t>(parse_number(f[8]));
    trace.push_back(r);
  }
  return trace;
}

inline void write_trace_jsonl(std::ostream& out, const Trace& trace) {
  for (const auto& r : trace) {
    nlohmann::ordered_json j;
    j["t"] = r.t;
    j["offered_rate"] = r.offered_rate;
    j["ready_pods"] = r.ready_pods;
    j["total_pods"] = r.total_pods;
    j["ready_nodes"] = r.ready_nodes;
    j["total_nodes"] = r.total_nodes;
    j["avg_relative_cpu"] = r.avg_relative_cpu;
    j["response_time"] = r.response_time;
    j["errors"] = r.errors;
    out << j.dump() << '\n';
  }
}

/// Series behind the classic three-panel attack figure: attack power,
/// pods and nodes, CPU and latency against time.
inline void write_plot_csv(std::ostream& out, const Trace& trace,
                           const WorkloadSchedule& schedule) {
  out << "t,attack_power,offered_rate,total_pods,ready_pods,total_nodes,avg_relative_cpu,"
         "response_time\n";
  for (const auto& r : trace) {
    const double power = nominal_rate_at(schedule, r.t) / schedule.base_rate - 1.0;
    out << r.t << ',' << format_number(power) << ',' << format_number(r.offered_rate) << ','
        << r.total_pods << ',' << r.ready_pods << ',' << r.total_nodes << ','
        << format_number(r.avg_relative_cpu) << ',' << format_number(r.response_time) << '\n';
  }
}

inline void write_actions_csv(std::ostream& out, const std::vector<ScalingAction>& actions) {
  out << "t,action,count,node,since,evicted_ready\n";
  for (const auto& a : actions) {
    out << a.at << ',' << to_string(a.kind) << ',' << a.count << ',';
    if (a.node) out << static_cast<std::uint32_t>(*a.node);
    out << ',';
    if (a.since) out << *a.since;
    out << ',' << a.evicted_ready << '\n';
  }
}

}  // namespace yoyo
