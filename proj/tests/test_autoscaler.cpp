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


#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "support.hpp"
#include "yoyo/autoscaler.hpp"
#include "yoyo/simulation.hpp"

namespace yoyo {
namespace {

// ---------------------------------------------------------------- average CPU

TEST(AverageRelativeCpu, Examples) {
  EXPECT_DOUBLE_EQ(average_relative_cpu(std::vector<double>{50, 50, 50}), 50);
  EXPECT_DOUBLE_EQ(average_relative_cpu(std::vector<double>{250}), 250);  // 500m used / 200m requested
  EXPECT_DOUBLE_EQ(average_relative_cpu(std::vector<double>{30, 60, 90}), 60);
}

TEST(AverageRelativeCpu, Rejects) {
  EXPECT_THROW(average_relative_cpu(std::vector<double>{}), std::domain_error);
  EXPECT_THROW(average_relative_cpu(std::vector<double>{10, -1}), std::invalid_argument);
}

// ---------------------------------------------------------------- target count

TEST(TargetPodCount, Examples) {
  EXPECT_EQ(target_pod_count(std::vector<double>{50, 50, 50}, 50, 3, 0.1), 3);
  EXPECT_EQ(target_pod_count(std::vector<double>{52, 52, 52}, 50, 3, 0.1), 3);
  EXPECT_EQ(target_pod_count(std::vector<double>{1050, 1050, 1050}, 50, 3, 0.1), 63);
}

TEST(TargetPodCount, BandEdgesAreInclusive) {
  // 55/50 and 45/50 sit exactly on the 10% edges.
  EXPECT_EQ(target_pod_count(std::vector<double>{55, 55, 55, 55}, 50, 4, 0.1), 4);
  EXPECT_EQ(target_pod_count(std::vector<double>{45, 45, 45, 45}, 50, 4, 0.1), 4);
  EXPECT_EQ(target_pod_count(std::vector<double>{56, 56, 56, 56}, 50, 4, 0.1), 5);
  EXPECT_EQ(target_pod_count(std::vector<double>{44, 44, 44, 44}, 50, 4, 0.1), 4);  // ceil(3.52)
  EXPECT_EQ(target_pod_count(std::vector<double>{20, 20, 20, 20}, 50, 4, 0.1), 2);
}

TEST(TargetPodCount, Rejects) {
  EXPECT_THROW(target_pod_count(std::vector<double>{50}, 0, 1, 0.1), std::invalid_argument);
  EXPECT_THROW(target_pod_count(std::vector<double>{50}, 50, 2, 0.1), std::invalid_argument);
  EXPECT_THROW(target_pod_count(std::vector<double>{}, 50, 0, 0.1), std::domain_error);
}

// Exact oracle: utilizations in integer milli-percent, so the band test and
// the ceiling are plain integer arithmetic.
int oracle_target(const std::vector<std::int64_t>& milli, std::int64_t target_milli,
                  std::int64_t tol_percent) {
  const std::int64_t sum = std::accumulate(milli.begin(), milli.end(), std::int64_t{0});
  const auto n = static_cast<std::int64_t>(milli.size());
  // |sum / (n * target) - 1| <= tol / 100
  if (100 * sum >= (100 - tol_percent) * n * target_milli &&
      100 * sum <= (100 + tol_percent) * n * target_milli)
    return static_cast<int>(n);
  return static_cast<int>((sum + target_milli - 1) / target_milli);
}

TEST(TargetPodCount, MatchesIntegerOracle) {
  testing::Gen gen(20240611);
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto n = gen.integer(1, 60);
    const auto target = gen.integer(10, 90) * 1000;
    const auto tol = gen.integer(0, 30);
    std::vector<std::int64_t> milli(static_cast<std::size_t>(n));
    // Half the cases hug the band edges, where rounding would bite.
    if (gen.coin()) {
      const std::int64_t edge = gen.coin() ? 100 + tol : 100 - tol;
      const std::int64_t each = edge * target / 100 + gen.integer(-1, 1);
      std::fill(milli.begin(), milli.end(), std::max<std::int64_t>(0, each));
    } else {
      for (auto& m : milli) m = gen.integer(0, 300000);
    }
    std::vector<double> u;
    for (auto m : milli) u.push_back(static_cast<double>(m) / 1000.0);
    const int got = target_pod_count(u, static_cast<double>(target) / 1000.0,
                                     static_cast<int>(n), static_cast<double>(tol) / 100.0);
    const int want = oracle_target(milli, target, tol);
    if (got != want) {
      ++mismatches;
      ADD_FAILURE() << "case " << i << ": got " << got << " want " << want;
    }
  }
  EXPECT_EQ(mismatches, 0);
}

// ---------------------------------------------------------------- config

TEST(ClusterConfig, Validates) {
  ClusterConfig c;
  EXPECT_NO_THROW(c.validate());
  auto bad = [](auto mutate) {
    ClusterConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), std::invalid_argument);
  };
  bad([](ClusterConfig& c) { c.i_p_up = 0; });
  bad([](ClusterConfig& c) { c.min_nodes = 0; });
  bad([](ClusterConfig& c) { c.max_nodes = 2; });
  bad([](ClusterConfig& c) { c.initial_nodes = 41; });
  bad([](ClusterConfig& c) { c.initial_pods = 13; });
  bad([](ClusterConfig& c) { c.u_target = 0; });
  bad([](ClusterConfig& c) { c.pod_burst_limit = 99; });
}

TEST(InitialState, SpreadsPodsOverReadyNodes) {
  ClusterConfig c;
  ClusterState s = make_initial_state(c);
  EXPECT_EQ(s.total_nodes(), 4);
  EXPECT_EQ(s.ready_nodes(), 4);
  EXPECT_EQ(s.ready_pods(), 3);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(s.nodes[i].active_pods, 1);
  EXPECT_EQ(s.nodes[3].active_pods, 0);
  EXPECT_FALSE(s.nodes[3].idle_since.has_value());  // never hosted anything
}

// ---------------------------------------------------------------- HPA

// Runs hpa_step once per second from `from` through `to` inclusive.
std::vector<ScalingAction> drive_hpa(ClusterState& s, const ClusterConfig& c, int desired,
                                     Seconds from, Seconds to) {
  std::vector<ScalingAction> all;
  for (Seconds t = from; t <= to; ++t) {
    s.now = t;
    auto a = hpa_step(s, c, desired);
    all.insert(all.end(), a.begin(), a.end());
  }
  return all;
}

TEST(HpaStep, ScaleUpAfterSixtySeconds) {
  ClusterConfig c;
  ClusterState s = make_initial_state(c);
  EXPECT_TRUE(drive_hpa(s, c, 12, 0, 59).empty());
  s.now = 60;
  auto a = hpa_step(s, c, 12);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].kind, ActionKind::CreatePods);
  EXPECT_EQ(a[0].count, 9);
  EXPECT_EQ(a[0].since, Seconds{0});
  EXPECT_EQ(s.live_pods(), 12);
}

TEST(HpaStep, ScaleDownAfterThreeHundredSeconds) {
  ClusterConfig c;
  c.initial_pods = 12;
  ClusterState s = make_initial_state(c);
  EXPECT_TRUE(drive_hpa(s, c, 3, 0, 299).empty());
  s.now = 300;
  auto a = hpa_step(s, c, 3);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].kind, ActionKind::TerminatePods);
  EXPECT_EQ(a[0].count, 9);
  EXPECT_EQ(s.live_pods(), 3);
  EXPECT_EQ(s.count_pods(PodPhase::Terminating), 9);
  // Newest go first: the survivors are the three oldest pods.
  for (const auto& p : s.pods) {
    EXPECT_EQ(p.phase == PodPhase::Terminating, static_cast<std::uint32_t>(p.id) >= 3);
  }
}

TEST(HpaStep, EquilibriumClearsTimers) {
  ClusterConfig c;
  ClusterState s = make_initial_state(c);
  drive_hpa(s, c, 6, 0, 30);
  EXPECT_TRUE(s.hpa_breach_up_since.has_value());
  s.now = 31;
  EXPECT_TRUE(hpa_step(s, c, 3).empty());
  EXPECT_FALSE(s.hpa_breach_up_since.has_value());
  EXPECT_FALSE(s.hpa_breach_down_since.has_value());
  // The interrupted breach starts over.
  EXPECT_TRUE(drive_hpa(s, c, 6, 32, 91).empty());
  s.now = 92;
  EXPECT_EQ(hpa_step(s, c, 6).size(), 1u);
}

TEST(HpaStep, DirectionChangeResetsTimer) {
  ClusterConfig c;
  c.initial_pods = 6;
  ClusterState s = make_initial_state(c);
  drive_hpa(s, c, 3, 0, 200);
  drive_hpa(s, c, 9, 201, 201);
  EXPECT_FALSE(s.hpa_breach_down_since.has_value());
  EXPECT_TRUE(drive_hpa(s, c, 3, 202, 501).empty());
  s.now = 502;
  EXPECT_EQ(hpa_step(s, c, 3).size(), 1u);
}

TEST(HpaStep, ClampsDesiredToOne) {
  ClusterConfig c;
  ClusterState s = make_initial_state(c);
  drive_hpa(s, c, 0, 0, 300);
  EXPECT_EQ(s.live_pods(), 1);
}

TEST(HpaStep, PendingPodsAreDroppedOnScaleDown) {
  ClusterConfig c;
  c.max_nodes = 4;
  ClusterState s = make_initial_state(c);
  drive_hpa(s, c, 20, 0, 60);  // 17 new pods, only 9 free slots
  EXPECT_EQ(s.pending_pods(), 8);
  drive_hpa(s, c, 10, 61, 361);
  EXPECT_EQ(s.live_pods(), 10);
  EXPECT_EQ(s.pending_pods(), 0);
}

// ---------------------------------------------------------------- CA

TEST(CaStep, ProvisionsForUnplaceablePods) {
  ClusterConfig c;
  c.initial_pods = 12;
  ClusterState s = make_initial_state(c);  // 4 nodes x 3, all full
  for (int i = 0; i < 9; ++i) s.pods.push_back({PodId{s.next_pod_id++}, PodPhase::Pending, 0});
  s.now = 10;
  auto a = ca_step(s, c);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].kind, ActionKind::CreateNodes);
  EXPECT_EQ(a[0].count, 3);
  EXPECT_EQ(s.total_nodes(), 7);
  EXPECT_EQ(s.ready_nodes(), 4);
}

TEST(CaStep, OnlyChecksOnItsCadence) {
  ClusterConfig c;
  c.initial_pods = 12;
  ClusterState s = make_initial_state(c);
  s.pods.push_back({PodId{s.next_pod_id++}, PodPhase::Pending, 0});
  for (Seconds t = 1; t < 10; ++t) {
    s.now = t;
    EXPECT_TRUE(ca_step(s, c).empty());
  }
  s.now = 10;
  EXPECT_EQ(ca_step(s, c).size(), 1u);
}

TEST(CaStep, NoActionWhenEverythingFits) {
  ClusterConfig c;
  c.initial_pods = 12;
  ClusterState s = make_initial_state(c);
  s.now = 10;
  EXPECT_TRUE(ca_step(s, c).empty());
}

TEST(CaStep, RespectsMaxNodes) {
  ClusterConfig c;
  c.initial_pods = 12;
  c.max_nodes = 5;
  ClusterState s = make_initial_state(c);
  for (int i = 0; i < 30; ++i) s.pods.push_back({PodId{s.next_pod_id++}, PodPhase::Pending, 0});
  s.now = 0;
  auto a = ca_step(s, c);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].count, 1);
  s.now = 10;
  EXPECT_TRUE(ca_step(s, c).empty());
}

TEST(CaStep, IdleNodeDrainsAtSixHundredAndLeavesAtSevenTwenty) {
  ClusterConfig c;
  ClusterState s = make_initial_state(c);
  s.nodes[3].idle_since = 100;
  for (Seconds t = 101; t < 700; ++t) {
    s.now = t;
    ASSERT_TRUE(ca_step(s, c).empty()) << t;
  }
  s.now = 700;
  auto drain = ca_step(s, c);
  ASSERT_EQ(drain.size(), 1u);
  EXPECT_EQ(drain[0].kind, ActionKind::DrainNode);
  EXPECT_EQ(drain[0].node, NodeId{3});
  for (Seconds t = 701; t < 820; ++t) {
    s.now = t;
    ASSERT_TRUE(ca_step(s, c).empty()) << t;
  }
  s.now = 820;
  auto remove = ca_step(s, c);
  ASSERT_EQ(remove.size(), 1u);
  EXPECT_EQ(remove[0].kind, ActionKind::RemoveNode);
  EXPECT_EQ(s.total_nodes(), 3);
}

TEST(CaStep, NeverDrainsBelowMinNodes) {
  ClusterConfig c;
  c.initial_pods = 1;
  c.initial_nodes = 5;
  ClusterState s = make_initial_state(c);  // the pod sits on node 0
  for (int i = 1; i < 5; ++i) s.nodes[i].idle_since = 5 - i;  // node 4 idle longest
  s.now = 1000;
  auto a = ca_step(s, c);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].node, NodeId{4});
  EXPECT_EQ(a[1].node, NodeId{3});
  EXPECT_EQ(s.ready_nodes(), 3);
}

TEST(CaStep, RemovalEvictsPodsBackToPending) {
  ClusterConfig c;
  ClusterState s = make_initial_state(c);
  // Force node 0 (hosting one Ready pod) into a finished drain.
  s.nodes[0].phase = NodePhase::Draining;
  s.nodes[0].phase_entered_at = 0;
  s.now = 120;
  auto a = ca_step(s, c);
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a[0].kind, ActionKind::RemoveNode);
  EXPECT_EQ(a[0].evicted_ready, 1);
  EXPECT_EQ(s.total_nodes(), 3);
  // Rescheduled straight onto the spare node.
  EXPECT_EQ(s.pending_pods(), 0);
  EXPECT_EQ(s.count_pods(PodPhase::Warming), 1);
}

TEST(Lifecycle, NewNodeWithNothingToHostStartsIdle) {
  ClusterConfig c;
  ClusterState s = make_initial_state(c);
  s.nodes.push_back({NodeId{s.next_node_id++}, NodePhase::Warming, 0});
  s.nodes.back().autoscaled = true;
  s.now = 120;
  advance_lifecycle(s, c);
  EXPECT_EQ(s.nodes.back().phase, NodePhase::Ready);
  EXPECT_EQ(s.nodes.back().idle_since, Seconds{120});
}

TEST(Lifecycle, LastPodLeavingStartsIdleClock) {
  ClusterConfig c;
  ClusterState s = make_initial_state(c);
  s.now = 10;
  s.pods[0].phase = PodPhase::Terminating;
  s.pods[0].phase_entered_at = 10;
  --s.nodes[0].active_pods;
  s.now = 15;
  advance_lifecycle(s, c);
  EXPECT_EQ(s.nodes[0].idle_since, Seconds{15});
  EXPECT_EQ(s.pods.size(), 2u);
}

// ---------------------------------------------------------------- properties

struct Tracked {
  Seconds created = 0;
  std::optional<Seconds> ready_at;
};

// Random demand against the real controllers, checking structural invariants
// and warm-up lower bounds at every tick.
TEST(ControllerProperties, InvariantsUnderRandomDemand) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    testing::Gen gen(seed);
    ClusterConfig c;
    c.max_nodes = static_cast<int>(gen.integer(4, 30));
    c.pods_per_node = static_cast<int>(gen.integer(1, 4));
    c.initial_nodes = std::max(c.min_nodes, 4);
    c.initial_pods = std::min(3, c.initial_nodes * c.pods_per_node);
    ClusterState s = make_initial_state(c);
    std::map<std::uint32_t, Tracked> pods;
    std::map<std::uint32_t, Seconds> node_created;
    for (const auto& p : s.pods) pods[static_cast<std::uint32_t>(p.id)] = {0, 0};
    for (const auto& n : s.nodes) node_created[static_cast<std::uint32_t>(n.id)] = -1000;

    int desired = 3;
    for (Seconds t = 0; t < 4000; ++t) {
      s.now = t;
      advance_lifecycle(s, c);
      if (gen.coin(0.01)) desired = static_cast<int>(gen.integer(0, 60));
      hpa_step(s, c, desired);
      ca_step(s, c);

      ASSERT_GE(s.ready_nodes(), std::min(c.min_nodes, c.initial_nodes));
      ASSERT_LE(s.total_nodes(), c.max_nodes);
      for (const auto& n : s.nodes) {
        const auto id = static_cast<std::uint32_t>(n.id);
        if (!node_created.contains(id)) node_created[id] = t;
        if (n.phase == NodePhase::Ready && node_created[id] >= 0)
          ASSERT_GE(t, node_created[id] + c.w_n_up);
        int active = 0;
        for (const auto& p : s.pods)
          if (p.node_id == n.id && p.phase != PodPhase::Terminating) ++active;
        ASSERT_EQ(active, n.active_pods);
        ASSERT_LE(active, c.pods_per_node);
      }
      for (const auto& p : s.pods) {
        const auto id = static_cast<std::uint32_t>(p.id);
        if (!pods.contains(id)) pods[id] = {t, std::nullopt};
        ASSERT_EQ(p.phase == PodPhase::Pending, !p.node_id.has_value());
        if (p.node_id) {
          const auto it = std::find_if(s.nodes.begin(), s.nodes.end(),
                                       [&](const NodeState& n) { return n.id == *p.node_id; });
          ASSERT_NE(it, s.nodes.end());
          if (p.phase != PodPhase::Terminating) ASSERT_NE(it->phase, NodePhase::Draining);
        }
        if (p.phase == PodPhase::Ready && !pods[id].ready_at) {
          pods[id].ready_at = t;
          ASSERT_GE(t, pods[id].created + c.w_p_up);
        }
      }
    }
  }
}

// ---------------------------------------------------------------- action timing

RunResult yoyo_run() {
  WorkloadSchedule w;
  w.kind = WorkloadKind::YoYo;
  w.power = 20;
  return run_simulation({}, {}, w, w.attack_end(), 1);
}

TEST(ActionTiming, ScaleUpNeedsFullBreach) {
  const ClusterConfig c;
  for (const auto& a : yoyo_run().actions) {
    if (a.kind == ActionKind::CreatePods) EXPECT_GE(a.at - *a.since, c.i_p_up);
    if (a.kind == ActionKind::TerminatePods) EXPECT_GE(a.at - *a.since, c.i_p_down);
    if (a.kind == ActionKind::DrainNode) EXPECT_GE(a.at - *a.since, c.i_n_down);
    if (a.kind == ActionKind::RemoveNode) EXPECT_EQ(a.at - *a.since, c.w_n_down);
  }
}

TEST(ActionTiming, Deterministic) {
  EXPECT_EQ(yoyo_run().actions, yoyo_run().actions);
}

}  // namespace
}  // namespace yoyo
