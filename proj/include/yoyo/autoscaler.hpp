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

// Two-tier Kubernetes autoscaling model: the Horizontal Pod Autoscaler (HPA)
// sizes the pod population from relative CPU utilization, and the Cluster
// Autoscaler (CA) adds nodes for unplaceable pods and removes long-idle ones.
// Both are deterministic state machines advanced once per simulated second.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace yoyo {

/// Simulated time in whole seconds since the start of a run.
using Seconds = std::int64_t;

enum class PodId : std::uint32_t {};
enum class NodeId : std::uint32_t {};

struct ClusterConfig {
  double u_target = 50.0;  // percent
  int pods_per_node = 3;   // R
  int initial_pods = 3;    // N_p
  int initial_nodes = 4;   // N_n
  int min_nodes = 3;
  int max_nodes = 40;

  Seconds i_p_up = 60;    // HPA scale-up interval
  Seconds i_p_down = 300; // HPA scale-down interval
  Seconds i_n_up = 10;    // CA pending-pod check period
  Seconds i_n_down = 600; // CA node idle interval
  Seconds w_p_up = 30;
  Seconds w_p_down = 5;
  Seconds w_n_up = 120;
  Seconds w_n_down = 120;

  double pod_capacity_rps = 20.0;  // rate at which one pod sits at exactly 100%
  double pod_burst_limit = 300.0;  // percent
  double hpa_tolerance = 0.10;

  void validate() const {
    auto fail = [](const std::string& what) {
      throw std::invalid_argument("cluster config: " + what);
    };
    for (auto [name, value] : {std::pair{"i_p_up", i_p_up}, {"i_p_down", i_p_down},
                               {"i_n_up", i_n_up}, {"i_n_down", i_n_down},
                               {"w_p_up", w_p_up}, {"w_p_down", w_p_down},
                               {"w_n_up", w_n_up}, {"w_n_down", w_n_down}}) {
      if (value <= 0) fail(std::string(name) + " must be > 0");
    }
    if (pods_per_node < 1) fail("pods_per_node must be >= 1");
    if (min_nodes < 1) fail("min_nodes must be >= 1");
    if (max_nodes < min_nodes) fail("max_nodes must be >= min_nodes");
    if (initial_nodes < min_nodes || initial_nodes > max_nodes)
      fail("initial_nodes must lie within [min_nodes, max_nodes]");
    if (initial_pods < 1) fail("initial_pods must be >= 1");
    if (initial_pods > initial_nodes * pods_per_node)
      fail("initial_pods must fit on the initial nodes");
    if (!(u_target > 0.0)) fail("u_target must be > 0");
    if (!(pod_capacity_rps > 0.0)) fail("pod_capacity_rps must be > 0");
    if (!(pod_burst_limit >= 100.0)) fail("pod_burst_limit must be >= 100");
    if (!(hpa_tolerance >= 0.0 && hpa_tolerance < 1.0))
      fail("hpa_tolerance must lie within [0, 1)");
  }

  friend bool operator==(const ClusterConfig&, const ClusterConfig&) = default;
};

enum class PodPhase { Pending, Warming, Ready, Terminating };
enum class NodePhase { Warming, Ready, Draining };

struct PodState {
  PodId id{};
  PodPhase phase = PodPhase::Pending;
  Seconds phase_entered_at = 0;
  std::optional<NodeId> node_id;  // absent iff Pending
};

struct NodeState {
  NodeId id{};
  NodePhase phase = NodePhase::Warming;
  Seconds phase_entered_at = 0;
  // Set when the last pod leaves, or when an autoscaled node comes up with
  // nothing left to host. Nodes that have never hosted a pod stay unset.
  std::optional<Seconds> idle_since;
  int active_pods = 0;    // non-Terminating pods bound here
  int assigned_pods = 0;  // all pods bound here, Terminating included
  bool autoscaled = false;
};

enum class ActionKind { CreatePods, TerminatePods, CreateNodes, DrainNode, RemoveNode };

inline const char* to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::CreatePods: return "CreatePods";
    case ActionKind::TerminatePods: return "TerminatePods";
    case ActionKind::CreateNodes: return "CreateNodes";
    case ActionKind::DrainNode: return "DrainNode";
    case ActionKind::RemoveNode: return "RemoveNode";
  }
  return "?";
}

struct ScalingAction {
  Seconds at = 0;
  ActionKind kind = ActionKind::CreatePods;
  int count = 0;
  std::optional<NodeId> node;
  // Breach start for pod actions, idle start for DrainNode, drain start for RemoveNode.
  std::optional<Seconds> since;
  int evicted_ready = 0;  // RemoveNode only

  friend bool operator==(const ScalingAction&, const ScalingAction&) = default;
};

struct ClusterState {
  Seconds now = 0;
  std::vector<PodState> pods;    // ascending id == creation order
  std::vector<NodeState> nodes;  // ascending id
  std::optional<Seconds> hpa_breach_up_since;
  std::optional<Seconds> hpa_breach_down_since;
  std::uint32_t next_pod_id = 0;
  std::uint32_t next_node_id = 0;

  int count_pods(PodPhase phase) const {
    return static_cast<int>(std::count_if(pods.begin(), pods.end(),
                                          [&](const PodState& p) { return p.phase == phase; }));
  }
  int count_nodes(NodePhase phase) const {
    return static_cast<int>(std::count_if(nodes.begin(), nodes.end(),
                                          [&](const NodeState& n) { return n.phase == phase; }));
  }
  int ready_pods() const { return count_pods(PodPhase::Ready); }
  int pending_pods() const { return count_pods(PodPhase::Pending); }
  /// Pods the HPA counts as current: everything not already terminating.
  int live_pods() const {
    return static_cast<int>(pods.size()) - count_pods(PodPhase::Terminating);
  }
  int ready_nodes() const { return count_nodes(NodePhase::Ready); }
  int total_nodes() const { return static_cast<int>(nodes.size()); }

  NodeState& node(NodeId id) {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                               [](const NodeState& n, NodeId key) { return n.id < key; });
    if (it == nodes.end() || it->id != id) throw std::logic_error("unknown node id");
    return *it;
  }
};

// ---------------------------------------------------------------------------
// HPA arithmetic

namespace detail {
// Relative slack used when comparing derived utilization ratios, so values that
// are mathematically on a boundary (e.g. 55/50 == 1.1) are not pushed across it
// by binary rounding.
inline constexpr double kRatioSlack = 1e-9;
}  // namespace detail

/// Mean of per-pod relative CPU utilizations (percent). May exceed 100.
inline double average_relative_cpu(std::span<const double> per_pod_utilization) {
  if (per_pod_utilization.empty())
    throw std::domain_error("average_relative_cpu: no pods to average");
  double sum = 0.0;
  for (double u : per_pod_utilization) {
    if (!(u >= 0.0)) throw std::invalid_argument("average_relative_cpu: negative utilization");
    sum += u;
  }
  return sum / static_cast<double>(per_pod_utilization.size());
}

/// Desired replica count: unchanged inside the tolerance band around
/// u_target, otherwise ceil(sum(U_i) / u_target).
inline int target_pod_count(std::span<const double> per_pod_utilization, double u_target,
                            int current_pods, double tolerance) {
  if (!(u_target > 0.0)) throw std::invalid_argument("target_pod_count: u_target must be > 0");
  if (current_pods != static_cast<int>(per_pod_utilization.size()))
    throw std::invalid_argument("target_pod_count: current_pods != number of utilizations");
  const double ratio = average_relative_cpu(per_pod_utilization) / u_target;
  const double lo = (1.0 - tolerance) * (1.0 - detail::kRatioSlack);
  const double hi = (1.0 + tolerance) * (1.0 + detail::kRatioSlack);
  if (ratio >= lo && ratio <= hi) return current_pods;

  const double sum = std::accumulate(per_pod_utilization.begin(), per_pod_utilization.end(), 0.0);
  const double pods = sum / u_target;
  const double nearest = std::round(pods);
  if (std::abs(pods - nearest) <= detail::kRatioSlack * std::max(1.0, nearest))
    return static_cast<int>(nearest);
  return static_cast<int>(std::ceil(pods));
}

// ---------------------------------------------------------------------------
// State construction and lifecycle

/// Binds Pending pods (oldest first) to the least-loaded Ready node with room.
inline void schedule_pending(ClusterState& state, const ClusterConfig& config) {
  for (auto& pod : state.pods) {
    if (pod.phase != PodPhase::Pending) continue;
    NodeState* best = nullptr;
    for (auto& node : state.nodes) {
      if (node.phase != NodePhase::Ready || node.active_pods >= config.pods_per_node) continue;
      if (best == nullptr || node.active_pods < best->active_pods) best = &node;
    }
    if (best == nullptr) return;
    pod.phase = PodPhase::Warming;
    pod.phase_entered_at = state.now;
    pod.node_id = best->id;
    ++best->active_pods;
    ++best->assigned_pods;
    best->idle_since.reset();
  }
}

/// Cluster at t = 0: N_n Ready nodes with N_p Ready pods spread across them.
inline ClusterState make_initial_state(const ClusterConfig& config) {
  config.validate();
  ClusterState state;
  for (int i = 0; i < config.initial_nodes; ++i) {
    state.nodes.push_back(NodeState{NodeId{state.next_node_id++}, NodePhase::Ready, 0});
  }
  for (int i = 0; i < config.initial_pods; ++i) {
    state.pods.push_back(PodState{PodId{state.next_pod_id++}, PodPhase::Pending, 0});
  }
  schedule_pending(state, config);
  for (auto& pod : state.pods) pod.phase = PodPhase::Ready;
  return state;
}

/// Applies every timer that expires at state.now, then schedules pending pods.
inline void advance_lifecycle(ClusterState& state, const ClusterConfig& config) {
  const Seconds now = state.now;
  std::erase_if(state.pods, [&](PodState& pod) {
    if (pod.phase == PodPhase::Warming && now - pod.phase_entered_at >= config.w_p_up) {
      pod.phase = PodPhase::Ready;
      pod.phase_entered_at = now;
    } else if (pod.phase == PodPhase::Terminating &&
               now - pod.phase_entered_at >= config.w_p_down) {
      NodeState& node = state.node(*pod.node_id);
      if (--node.assigned_pods == 0) node.idle_since = now;
      return true;
    }
    return false;
  });

  std::vector<NodeId> came_up;
  for (auto& node : state.nodes) {
    if (node.phase == NodePhase::Warming && now - node.phase_entered_at >= config.w_n_up) {
      node.phase = NodePhase::Ready;
      node.phase_entered_at = now;
      came_up.push_back(node.id);
    }
  }
  schedule_pending(state, config);
  for (NodeId id : came_up) {
    NodeState& node = state.node(id);
    if (node.assigned_pods == 0) node.idle_since = now;
  }
}

// ---------------------------------------------------------------------------
// Controllers

/// One HPA evaluation at state.now. `desired` below 1 is clamped to 1.
inline std::vector<ScalingAction> hpa_step(ClusterState& state, const ClusterConfig& config,
                                           int desired) {
  desired = std::max(desired, 1);
  const int live = state.live_pods();
  const Seconds now = state.now;
  std::vector<ScalingAction> actions;

  if (desired > live) {
    state.hpa_breach_down_since.reset();
    if (!state.hpa_breach_up_since) state.hpa_breach_up_since = now;
    if (now - *state.hpa_breach_up_since >= config.i_p_up) {
      const int n = desired - live;
      for (int i = 0; i < n; ++i) {
        state.pods.push_back(PodState{PodId{state.next_pod_id++}, PodPhase::Pending, now});
      }
      actions.push_back({now, ActionKind::CreatePods, n, std::nullopt, state.hpa_breach_up_since});
      state.hpa_breach_up_since.reset();
      schedule_pending(state, config);
    }
  } else if (desired < live) {
    state.hpa_breach_up_since.reset();
    if (!state.hpa_breach_down_since) state.hpa_breach_down_since = now;
    if (now - *state.hpa_breach_down_since >= config.i_p_down) {
      const int n = live - desired;
      int remaining = n;
      std::vector<PodId> dropped;
      // Newest first; a Pending pod holds no node and simply disappears.
      for (auto it = state.pods.rbegin(); it != state.pods.rend() && remaining > 0; ++it) {
        if (it->phase == PodPhase::Terminating) continue;
        if (it->phase == PodPhase::Pending) {
          dropped.push_back(it->id);
        } else {
          --state.node(*it->node_id).active_pods;
          it->phase = PodPhase::Terminating;
          it->phase_entered_at = now;
        }
        --remaining;
      }
      std::erase_if(state.pods, [&](const PodState& p) {
        return std::find(dropped.begin(), dropped.end(), p.id) != dropped.end();
      });
      actions.push_back(
          {now, ActionKind::TerminatePods, n, std::nullopt, state.hpa_breach_down_since});
      state.hpa_breach_down_since.reset();
    }
  } else {
    state.hpa_breach_up_since.reset();
    state.hpa_breach_down_since.reset();
  }
  return actions;
}

/// One CA evaluation at state.now: finishes drains, provisions nodes for
/// unplaceable pods on the i_n_up cadence, and starts draining nodes idle
/// for at least i_n_down.
inline std::vector<ScalingAction> ca_step(ClusterState& state, const ClusterConfig& config) {
  const Seconds now = state.now;
  std::vector<ScalingAction> actions;

  // Drained nodes leave the cluster; anything still bound to them is evicted.
  for (auto it = state.nodes.begin(); it != state.nodes.end();) {
    if (it->phase != NodePhase::Draining || now - it->phase_entered_at < config.w_n_down) {
      ++it;
      continue;
    }
    const NodeId gone = it->id;
    int evicted_ready = 0;
    std::erase_if(state.pods, [&](PodState& pod) {
      if (pod.node_id != gone) return false;
      if (pod.phase == PodPhase::Terminating) return true;
      if (pod.phase == PodPhase::Ready) ++evicted_ready;
      pod.phase = PodPhase::Pending;
      pod.phase_entered_at = now;
      pod.node_id.reset();
      return false;
    });
    actions.push_back({now, ActionKind::RemoveNode, 1, gone, it->phase_entered_at, evicted_ready});
    it = state.nodes.erase(it);
  }
  if (!actions.empty()) schedule_pending(state, config);

  if (now % config.i_n_up == 0) {
    int free_slots = 0;
    for (const auto& node : state.nodes) {
      if (node.phase != NodePhase::Draining)
        free_slots += std::max(0, config.pods_per_node - node.active_pods);
    }
    const int unplaceable = state.pending_pods() - free_slots;
    if (unplaceable > 0) {
      const int wanted = (unplaceable + config.pods_per_node - 1) / config.pods_per_node;
      const int n = std::min(wanted, config.max_nodes - state.total_nodes());
      if (n > 0) {
        for (int i = 0; i < n; ++i) {
          NodeState node{NodeId{state.next_node_id++}, NodePhase::Warming, now};
          node.autoscaled = true;
          state.nodes.push_back(node);
        }
        actions.push_back({now, ActionKind::CreateNodes, n});
      }
    }
  }

  int removable = state.ready_nodes() - config.min_nodes;
  if (removable > 0) {
    std::vector<NodeState*> idle;
    for (auto& node : state.nodes) {
      if (node.phase == NodePhase::Ready && node.assigned_pods == 0 && node.idle_since &&
          now - *node.idle_since >= config.i_n_down) {
        idle.push_back(&node);
      }
    }
    std::stable_sort(idle.begin(), idle.end(), [](const NodeState* a, const NodeState* b) {
      return *a->idle_since < *b->idle_since;
    });
    for (NodeState* node : idle) {
      if (removable-- == 0) break;
      node->phase = NodePhase::Draining;
      node->phase_entered_at = now;
      actions.push_back({now, ActionKind::DrainNode, 1, node->id, node->idle_since});
    }
  }
  return actions;
}

}  // namespace yoyo
