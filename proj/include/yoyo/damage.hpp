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

// Damage accounting for an attack run: extra latency and extra nodes over the
// attack window, their ratios to a power-1 run of the same shape, the
// attacker's cost and potency, and what the cloud bill comes to.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "yoyo/simulation.hpp"

namespace yoyo {

/// Half-open tick range [begin, end).
struct TimeWindow {
  Seconds begin = 0;
  Seconds end = 0;
  Seconds length() const { return end - begin; }
};

/// First on-phase start up to t_off after the last on-phase ends. Flat and
/// steady workloads span the whole run.
inline TimeWindow attack_window(const WorkloadSchedule& schedule, Seconds duration) {
  if (schedule.kind == WorkloadKind::YoYo)
    return {0, std::min(duration, schedule.attack_end())};
  return {0, duration};
}

namespace detail {
template <typename Field>
double window_mean(const Trace& trace, TimeWindow window, Field field) {
  if (window.begin < 0 || window.end > static_cast<Seconds>(trace.size()))
    throw std::invalid_argument("window lies outside the trace");
  if (window.length() <= 0) throw std::domain_error("empty window");
  double sum = 0.0;
  for (Seconds t = window.begin; t < window.end; ++t) sum += field(trace[t]);
  return sum / static_cast<double>(window.length());
}
}  // namespace detail

inline double mean_response_time(const Trace& trace, TimeWindow window) {
  return detail::window_mean(trace, window, [](const TraceRow& r) { return r.response_time; });
}

inline double mean_nodes(const Trace& trace, TimeWindow window) {
  return detail::window_mean(trace, window,
                             [](const TraceRow& r) { return double(r.total_nodes); });
}

/// D_p: mean extra response time (ms) over the window.
inline double performance_damage(const Trace& trace, double steady_response, TimeWindow window) {
  return std::max(0.0, mean_response_time(trace, window) - steady_response);
}

/// D_e: mean extra nodes over the window.
inline double economic_damage(const Trace& trace, double baseline_nodes, TimeWindow window) {
  return std::max(0.0, mean_nodes(trace, window) - baseline_nodes);
}

inline double relative_damage(double attack_value, double k1_baseline_value) {
  if (!(k1_baseline_value > 0.0))
    throw std::domain_error("relative_damage: baseline is zero, ratio undefined");
  return attack_value / k1_baseline_value;
}

/// Cost(k) = k * t_on / T.
inline double attack_cost(double k, double t_on, double period) {
  if (!(t_on > 0.0 && t_on <= period))
    throw std::invalid_argument("attack_cost: need 0 < t_on <= T");
  return k * t_on / period;
}

inline double potency(double rd_e, double cost) {
  if (!(cost > 0.0)) throw std::domain_error("potency: zero attack cost");
  return rd_e / cost;
}

struct PricingConfig {
  double node_rate = 0.0475 / 3600.0;  // currency per node-second
  Seconds min_billing = 60;
  double mgmt_fee = 0.10;  // currency per hour

  void validate() const {
    if (!(node_rate >= 0.0)) throw std::invalid_argument("pricing: node_rate must be >= 0");
    if (min_billing < 0) throw std::invalid_argument("pricing: min_billing must be >= 0");
    if (!(mgmt_fee >= 0.0)) throw std::invalid_argument("pricing: mgmt_fee must be >= 0");
  }

  friend bool operator==(const PricingConfig&, const PricingConfig&) = default;
};

/// Node lifetimes (seconds) recovered from the node-count series. Nodes added
/// last are taken to leave first; nodes alive at the end are billed up to it.
inline std::vector<Seconds> node_lifetimes(const Trace& trace) {
  std::vector<Seconds> started;
  std::vector<Seconds> lifetimes;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto t = static_cast<Seconds>(i);
    const auto n = static_cast<std::size_t>(std::max(0, trace[i].total_nodes));
    while (started.size() < n) started.push_back(t);
    while (started.size() > n) {
      lifetimes.push_back(t - started.back());
      started.pop_back();
    }
  }
  const auto end = static_cast<Seconds>(trace.size());
  for (auto it = started.rbegin(); it != started.rend(); ++it) lifetimes.push_back(end - *it);
  return lifetimes;
}

/// Per-second node billing with a minimum charge per node, plus a flat
/// hourly management fee prorated over the trace duration.
inline double billed_cost(std::span<const Seconds> lifetimes, Seconds duration,
                          const PricingConfig& pricing) {
  pricing.validate();
  double total = 0.0;
  for (Seconds life : lifetimes) {
    total += pricing.node_rate * static_cast<double>(std::max(life, pricing.min_billing));
  }
  total += pricing.mgmt_fee * static_cast<double>(duration) / 3600.0;
  return total;
}

inline double billed_cost(const Trace& trace, const PricingConfig& pricing) {
  return billed_cost(node_lifetimes(trace), static_cast<Seconds>(trace.size()), pricing);
}

// ---------------------------------------------------------------------------
// Scenario-level assessment

struct DamageReport {
  double d_p = 0.0;
  std::optional<double> rd_p;
  double d_e = 0.0;
  std::optional<double> rd_e;
  double cost = 0.0;
  std::optional<double> potency;
  double billed_amount = 0.0;

  // Inputs behind the figures above.
  double steady_response = 0.0;
  double baseline_nodes = 0.0;
  double d_p_k1 = 0.0;
  double d_e_k1 = 0.0;
  double mean_nodes_attack = 0.0;
  double mean_nodes_k1 = 0.0;
  TimeWindow window;
};

/// The three runs every assessment needs: steady load, the same shape at
/// power 1, and the attack itself.
struct Triplet {
  WorkloadSchedule schedule;
  Seconds duration = 0;
  RunResult steady;
  RunResult k1;
  RunResult attack;
};

inline Triplet run_triplet(const ClusterConfig& cluster, const ServiceModelConfig& service,
                           const WorkloadSchedule& schedule, Seconds duration,
                           std::uint64_t seed) {
  Triplet out{schedule, duration};
  WorkloadSchedule steady = schedule;
  steady.kind = WorkloadKind::Steady;
  WorkloadSchedule k1 = schedule;
  k1.power = 1.0;
  out.steady = run_simulation(cluster, service, steady, duration, seed);
  out.k1 = run_simulation(cluster, service, k1, duration, seed);
  out.attack = run_simulation(cluster, service, schedule, duration, seed);
  return out;
}

inline double schedule_cost(const WorkloadSchedule& schedule, Seconds duration) {
  switch (schedule.kind) {
    case WorkloadKind::Steady: return 0.0;
    case WorkloadKind::FlatDdos:
      return attack_cost(schedule.power, double(duration), double(duration));
    case WorkloadKind::YoYo:
      return attack_cost(schedule.power, double(schedule.t_on), double(schedule.period()));
  }
  return 0.0;
}

/// RD_p divides extra latency by the power-1 run's extra latency. RD_e divides
/// the mean node count by the power-1 run's mean node count: a power-1 surge
/// fits on the initial nodes, so its *extra* node count is zero and that
/// ratio would never be defined.
inline DamageReport assess_damage(const Triplet& runs, const PricingConfig& pricing) {
  DamageReport r;
  r.window = attack_window(runs.schedule, runs.duration);
  r.steady_response = mean_response_time(runs.steady.trace, r.window);
  r.baseline_nodes = mean_nodes(runs.steady.trace, r.window);

  r.d_p = performance_damage(runs.attack.trace, r.steady_response, r.window);
  r.d_p_k1 = performance_damage(runs.k1.trace, r.steady_response, r.window);
  r.d_e = economic_damage(runs.attack.trace, r.baseline_nodes, r.window);
  r.d_e_k1 = economic_damage(runs.k1.trace, r.baseline_nodes, r.window);
  r.mean_nodes_attack = mean_nodes(runs.attack.trace, r.window);
  r.mean_nodes_k1 = mean_nodes(runs.k1.trace, r.window);

  if (r.d_p_k1 > 0.0) r.rd_p = relative_damage(r.d_p, r.d_p_k1);
  if (r.mean_nodes_k1 > 0.0) r.rd_e = relative_damage(r.mean_nodes_attack, r.mean_nodes_k1);
  r.cost = schedule_cost(runs.schedule, runs.duration);
  if (r.rd_e && r.cost > 0.0) r.potency = potency(*r.rd_e, r.cost);
  r.billed_amount = billed_cost(runs.attack.trace, pricing);
  return r;
}

inline nlohmann::ordered_json to_json(const DamageReport& r) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::ordered_json {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["d_p"] = r.d_p;
  j["rd_p"] = opt(r.rd_p);
  j["d_e"] = r.d_e;
  j["rd_e"] = opt(r.rd_e);
  j["cost"] = r.cost;
  j["potency"] = opt(r.potency);
  j["billed_amount"] = r.billed_amount;
  j["baseline"] = {{"steady_response", r.steady_response},
                   {"baseline_nodes", r.baseline_nodes},
                   {"d_p_k1", r.d_p_k1},
                   {"d_e_k1", r.d_e_k1},
                   {"mean_nodes_attack", r.mean_nodes_attack},
                   {"mean_nodes_k1", r.mean_nodes_k1}};
  j["window"] = {{"begin", r.window.begin}, {"end", r.window.end}};
  return j;
}

}  // namespace yoyo
