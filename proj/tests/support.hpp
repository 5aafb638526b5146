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

// Seeded generators for the property tests. Built on the portable helpers
// in random.hpp so failures reproduce across standard libraries.

#include <cstdint>
#include <random>
#include <vector>

#include "yoyo/random.hpp"

namespace yoyo::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(uniform_below(rng_, static_cast<std::uint64_t>(hi - lo + 1)));
  }
  /// Uniform real in [lo, hi).
  double real(double lo, double hi) { return lo + (hi - lo) * unit_interval(rng_()); }
  bool coin(double p = 0.5) { return unit_interval(rng_()) < p; }

  std::vector<double> reals(std::size_t n, double lo, double hi) {
    std::vector<double> out(n);
    for (auto& v : out) v = real(lo, hi);
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace yoyo::testing
