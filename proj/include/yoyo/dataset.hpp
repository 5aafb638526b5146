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

// Labeled detector datasets: one simulated run per grid cell and repetition,
// reduced to its feature vector.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <istream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "yoyo/features.hpp"
#include "yoyo/io.hpp"
#include "yoyo/random.hpp"
#include "yoyo/simulation.hpp"

namespace yoyo {

enum class TimerKind { Constant, Random };

struct OnOff {
  Seconds t_on = 600;
  Seconds t_off = 1200;
};

struct DatasetGrid {
  std::vector<Seconds> regular_ramp_ups = {30, 60, 120};
  std::vector<double> regular_powers = {1, 3, 5, 7};
  std::vector<TimerKind> regular_timers = {TimerKind::Constant, TimerKind::Random};
  std::vector<Seconds> attack_ramp_ups = {30, 60, 120};
  std::vector<OnOff> attack_timings = {{420, 840}, {600, 1200}, {720, 1440}};
  std::vector<double> attack_powers = {15, 20, 30};
  std::vector<TimerKind> attack_timers = {TimerKind::Constant};

  int attack_cycles = 3;
  Seconds regular_duration = 3 * 1800;  // three cycles of the default 10/20 min period
  double base_rate = 30.0;
  double constant_delay = 0.1;
  RandomJitter random_jitter{0.8, 1.2};
};

struct GridCell {
  Label label = Label::Regular;
  WorkloadSchedule schedule;
  Seconds duration = 0;
  std::string tag;
};

inline std::vector<GridCell> enumerate_cells(const DatasetGrid& grid) {
  auto jitter_for = [&](TimerKind kind) -> Jitter {
    if (kind == TimerKind::Random) return grid.random_jitter;
    return ConstantJitter{grid.constant_delay};
  };
  std::vector<GridCell> cells;
  for (Seconds ramp : grid.regular_ramp_ups)
    for (double k : grid.regular_powers)
      for (TimerKind timer : grid.regular_timers) {
        GridCell c;
        c.label = Label::Regular;
        c.schedule.kind = WorkloadKind::FlatDdos;
        c.schedule.base_rate = grid.base_rate;
        c.schedule.power = k;
        c.schedule.ramp_up = ramp;
        c.schedule.jitter = jitter_for(timer);
        c.duration = grid.regular_duration;
        c.tag = "regular ramp=" + std::to_string(ramp) + " k=" + format_number(k) +
                (timer == TimerKind::Random ? " timer=random" : " timer=constant");
        cells.push_back(std::move(c));
      }
  for (Seconds ramp : grid.attack_ramp_ups)
    for (const OnOff& timing : grid.attack_timings)
      for (double k : grid.attack_powers)
        for (TimerKind timer : grid.attack_timers) {
          GridCell c;
          c.label = Label::Attack;
          c.schedule.kind = WorkloadKind::YoYo;
          c.schedule.base_rate = grid.base_rate;
          c.schedule.power = k;
          c.schedule.t_on = timing.t_on;
          c.schedule.t_off = timing.t_off;
          c.schedule.cycles = grid.attack_cycles;
          c.schedule.ramp_up = ramp;
          c.schedule.jitter = jitter_for(timer);
          c.duration = c.schedule.attack_end();
          c.tag = "attack ramp=" + std::to_string(ramp) + " on=" + std::to_string(timing.t_on) +
                  " off=" + std::to_string(timing.t_off) + " k=" + format_number(k) +
                  (timer == TimerKind::Random ? " timer=random" : " timer=constant");
          cells.push_back(std::move(c));
        }
  return cells;
}

/// Minimum trace length a cell's samples must cover: three full periods.
/// Regular load has no period of its own; its grid duration stands in.
inline Seconds required_length(const GridCell& cell, const DatasetGrid& grid) {
  if (cell.schedule.kind == WorkloadKind::YoYo) return 3 * cell.schedule.period();
  return grid.regular_duration;
}

struct LabeledDataset {
  std::vector<FeatureVector> samples;
  std::vector<std::string> tags;  // grid cell of each sample
};

/// Calls fn(i) for i in [0, n) on up to hardware_concurrency threads.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Simulates every cell `runs_per_cell` times (sample i uses seed
/// hash_mix(seed, i)) and extracts features. Output order is cell-major.
inline LabeledDataset build_dataset(const DatasetGrid& grid, int runs_per_cell,
                                    std::uint64_t seed, const ClusterConfig& cluster = {},
                                    const ServiceModelConfig& service = {}) {
  if (runs_per_cell < 1) throw std::invalid_argument("build_dataset: runs_per_cell must be >= 1");
  const std::vector<GridCell> cells = enumerate_cells(grid);
  const std::size_t total = cells.size() * static_cast<std::size_t>(runs_per_cell);

  LabeledDataset out;
  out.samples.resize(total);
  out.tags.resize(total);
  parallel_for(total, [&](std::size_t i) {
    const GridCell& cell = cells[i / runs_per_cell];
    const RunResult run =
        run_simulation(cluster, service, cell.schedule, cell.duration, hash_mix(seed, i));
    out.samples[i] = extract_features(run.trace, required_length(cell, grid), cell.label);
    out.tags[i] = cell.tag;
  });
  return out;
}

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle, then the first round(n * train_fraction) indices train.
inline Split train_test_split(std::size_t n, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train_test_split: fraction must lie in (0, 1)");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  seeded_shuffle<std::size_t>(order, seed);
  const auto cut = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  Split s;
  s.train.assign(order.begin(), order.begin() + cut);
  s.test.assign(order.begin() + cut, order.end());
  return s;
}

inline std::vector<FeatureVector> select(const std::vector<FeatureVector>& samples,
                                         const std::vector<std::size_t>& indices) {
  std::vector<FeatureVector> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(samples.at(i));
  return out;
}

// ---------------------------------------------------------------------------
// CSV: 20 feature columns then `label`.

inline void write_dataset_csv(std::ostream& out, const std::vector<FeatureVector>& samples) {
  for (const auto& name : FeatureVector::names()) out << name << ',';
  out << "label\n";
  for (const auto& s : samples) {
    for (double v : s.values) out << format_number(v) << ',';
    out << static_cast<int>(s.label) << '\n';
  }
}

inline std::vector<FeatureVector> read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset csv: empty input");
  const auto header = split_csv_line(line);
  const auto names = FeatureVector::names();
  if (header.size() != kFeatureCount + 1 || header.back() != "label")
    throw std::runtime_error("dataset csv: unexpected header");
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (header[i] != names[i])
      throw std::runtime_error("dataset csv: column " + std::to_string(i + 1) + " should be " +
                               names[i]);
  }
  std::vector<FeatureVector> samples;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != kFeatureCount + 1)
      throw std::runtime_error("dataset csv line " + std::to_string(lineno) + ": expected " +
                               std::to_string(kFeatureCount + 1) + " fields");
    FeatureVector fv;
    for (std::size_t i = 0; i < kFeatureCount; ++i) fv.values[i] = parse_number(fields[i]);
    if (fields.back() == "0") fv.label = Label::Regular;
    else if (fields.back() == "1") fv.label = Label::Attack;
    else throw std::runtime_error("dataset csv line " + std::to_string(lineno) + ": bad label");
    samples.push_back(fv);
  }
  return samples;
}

}  // namespace yoyo
