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

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "yoyo/simulation.hpp"

namespace yoyo {

enum class Label : int { Regular = 0, Attack = 1 };

inline constexpr std::size_t kSeriesCount = 4;
inline constexpr std::size_t kStatCount = 5;
inline constexpr std::size_t kFeatureCount = kSeriesCount * kStatCount;

inline constexpr std::array<const char*, kSeriesCount> kSeriesNames = {
    "response_time", "pods", "cpu_load", "nodes"};
inline constexpr std::array<const char*, kStatCount> kStatNames = {
    "mean", "std", "max", "min", "median"};

struct SeriesStats {
  double mean = 0.0;
  double std = 0.0;  // population (divide by n)
  double max = 0.0;
  double min = 0.0;
  double median = 0.0;  // midpoint of the two middle values for even n
};

inline SeriesStats describe(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("describe: empty series");
  SeriesStats s;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  s.min = s.max = values.front();
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / n;
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / n);

  std::vector<double> sorted(values.begin(), values.end());
  const std::size_t mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
  s.median = sorted[mid];
  if (sorted.size() % 2 == 0) {
    const double lower = *std::max_element(sorted.begin(), sorted.begin() + mid);
    s.median = (lower + s.median) / 2.0;
  }
  return s;
}

struct FeatureVector {
  std::array<double, kFeatureCount> values{};
  Label label = Label::Regular;

  /// `<series>_<stat>`, series-major.
  static std::vector<std::string> names() {
    std::vector<std::string> out;
    out.reserve(kFeatureCount);
    for (const char* series : kSeriesNames)
      for (const char* stat : kStatNames) out.push_back(std::string(series) + "_" + stat);
    return out;
  }

  double get(std::size_t series, std::size_t stat) const {
    return values[series * kStatCount + stat];
  }
};

/// Summary statistics of the response time, pod, CPU and node series over the
/// whole trace. Traces shorter than `min_length` ticks are rejected.
inline FeatureVector extract_features(const Trace& trace, Seconds min_length,
                                      Label label = Label::Regular) {
  if (static_cast<Seconds>(trace.size()) < min_length || trace.empty()) {
    throw std::invalid_argument("extract_features: trace has " + std::to_string(trace.size()) +
                                " ticks, at least " + std::to_string(std::max<Seconds>(min_length, 1)) +
                                " required (three full attack cycles)");
  }
  FeatureVector fv;
  fv.label = label;
  std::vector<double> series(trace.size());
  for (std::size_t s = 0; s < kSeriesCount; ++s) {
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const TraceRow& r = trace[i];
      switch (s) {
        case 0: series[i] = r.response_time; break;
        case 1: series[i] = r.total_pods; break;
        case 2: series[i] = r.avg_relative_cpu; break;
        default: series[i] = r.total_nodes; break;
      }
    }
    const SeriesStats st = describe(series);
    const std::array<double, kStatCount> row = {st.mean, st.std, st.max, st.min, st.median};
    std::copy(row.begin(), row.end(), fv.values.begin() + s * kStatCount);
  }
  return fv;
}

}  // namespace yoyo
