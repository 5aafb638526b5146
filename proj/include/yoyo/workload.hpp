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
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "yoyo/autoscaler.hpp"
#include "yoyo/random.hpp"

namespace yoyo {

enum class WorkloadKind { Steady, FlatDdos, YoYo };

struct NoJitter {
  friend bool operator==(const NoJitter&, const NoJitter&) = default;
};
/// Fixed inter-request delay. Leaves the rate untouched.
struct ConstantJitter {
  double delay_seconds = 0.0;
  friend bool operator==(const ConstantJitter&, const ConstantJitter&) = default;
};
/// Per-tick multiplicative rate noise drawn uniformly from [lo, hi].
struct RandomJitter {
  double lo = 0.8;
  double hi = 1.2;
  friend bool operator==(const RandomJitter&, const RandomJitter&) = default;
};
using Jitter = std::variant<NoJitter, ConstantJitter, RandomJitter>;

struct WorkloadSchedule {
  WorkloadKind kind = WorkloadKind::Steady;
  double base_rate = 30.0;  // r, requests/sec
  double power = 20.0;      // k
  Seconds t_on = 600;
  Seconds t_off = 1200;
  int cycles = 3;
  Seconds ramp_up = 0;
  Jitter jitter = NoJitter{};
  std::uint64_t seed = 0;

  Seconds period() const { return t_on + t_off; }

  /// End of the attack pattern; the rate is r from here on for YoYo.
  Seconds attack_end() const { return static_cast<Seconds>(cycles) * period(); }

  void validate() const {
    auto fail = [](const std::string& what) {
      throw std::invalid_argument("workload: " + what);
    };
    if (!(base_rate > 0.0)) fail("base_rate must be > 0");
    if (!(power >= 1.0)) fail("power must be >= 1");
    if (ramp_up < 0) fail("ramp_up must be >= 0");
    if (kind == WorkloadKind::YoYo) {
      if (t_on <= 0 || t_off <= 0) fail("t_on and t_off must be > 0");
      if (cycles < 1) fail("cycles must be >= 1");
    }
    if (const auto* rj = std::get_if<RandomJitter>(&jitter)) {
      if (!(rj->lo >= 0.0 && rj->lo <= rj->hi)) fail("random jitter needs 0 <= lo <= hi");
    }
    if (const auto* cj = std::get_if<ConstantJitter>(&jitter)) {
      if (!(cj->delay_seconds >= 0.0)) fail("constant jitter delay must be >= 0");
    }
  }

  friend bool operator==(const WorkloadSchedule&, const WorkloadSchedule&) = default;
};

inline const char* to_string(WorkloadKind kind) {
  switch (kind) {
    case WorkloadKind::Steady: return "steady";
    case WorkloadKind::FlatDdos: return "flat";
    case WorkloadKind::YoYo: return "yoyo";
  }
  return "?";
}

namespace detail {
inline double elevated_level(const WorkloadSchedule& s, Seconds since_increase) {
  const double extra = s.power * s.base_rate;
  if (s.ramp_up <= 0 || since_increase >= s.ramp_up) return s.base_rate + extra;
  return s.base_rate + extra * static_cast<double>(since_increase) / static_cast<double>(s.ramp_up);
}
}  // namespace detail

/// Noise-free rate level at time t.
inline double nominal_rate_at(const WorkloadSchedule& s, Seconds t) {
  if (t < 0) throw std::invalid_argument("rate_at: t must be >= 0");
  switch (s.kind) {
    case WorkloadKind::Steady:
      return s.base_rate;
    case WorkloadKind::FlatDdos:
      return detail::elevated_level(s, t);
    case WorkloadKind::YoYo: {
      if (t >= s.attack_end()) return s.base_rate;
      const Seconds phase = t % s.period();
      return phase < s.t_on ? detail::elevated_level(s, phase) : s.base_rate;
    }
  }
  return s.base_rate;
}

/// Multiplicative jitter factor for the tick at t; a pure function of (jitter, seed, t).
inline double jitter_factor(const WorkloadSchedule& s, Seconds t) {
  if (const auto* rj = std::get_if<RandomJitter>(&s.jitter)) {
    const double u = unit_interval(hash_mix(s.seed, static_cast<std::uint64_t>(t)));
    return rj->lo + (rj->hi - rj->lo) * u;
  }
  return 1.0;
}

/// Offered request rate (requests/sec) at time t.
inline double rate_at(const WorkloadSchedule& s, Seconds t) {
  return nominal_rate_at(s, t) * jitter_factor(s, t);
}

/// Attack on-time that lets both pod and node scale-up complete.
inline Seconds optimal_t_on(const ClusterConfig& c) {
  return c.i_p_up + c.w_p_up + c.i_n_up + c.w_n_up;
}

/// Attack off-time that lets pods, then nodes, scale all the way back down.
inline Seconds optimal_t_off(const ClusterConfig& c) {
  return c.i_p_down + c.w_p_down + c.i_n_down + c.w_n_down;
}

/// Parses "30", "30s", "10m" or "2h" into seconds.
inline Seconds parse_duration(std::string_view text) {
  auto bad = [&] { return std::invalid_argument("invalid duration '" + std::string(text) + "'"); };
  if (text.empty()) throw bad();
  Seconds scale = 1;
  switch (text.back()) {
    case 's': text.remove_suffix(1); break;
    case 'm': scale = 60; text.remove_suffix(1); break;
    case 'h': scale = 3600; text.remove_suffix(1); break;
    default: break;
  }
  if (text.empty()) throw bad();
  Seconds value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw bad();
    value = value * 10 + (c - '0');
  }
  return value * scale;
}

/// YoYo shorthand such as "k=20 on=10m off=20m n=6". Unlisted fields keep
/// the values in `base`.
inline WorkloadSchedule parse_attack_shorthand(std::string_view text,
                                               WorkloadSchedule base = {}) {
  base.kind = WorkloadKind::YoYo;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == token.size())
      throw std::invalid_argument("attack shorthand: expected key=value, got '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    try {
      if (key == "k") base.power = std::stod(value);
      else if (key == "r") base.base_rate = std::stod(value);
      else if (key == "on") base.t_on = parse_duration(value);
      else if (key == "off") base.t_off = parse_duration(value);
      else if (key == "n") base.cycles = std::stoi(value);
      else if (key == "ramp") base.ramp_up = parse_duration(value);
      else throw std::invalid_argument("unknown key");
    } catch (const std::exception&) {
      throw std::invalid_argument("attack shorthand: bad field '" + token + "'");
    }
  }
  base.validate();
  return base;
}

}  // namespace yoyo
