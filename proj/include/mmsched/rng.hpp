// Copyright 2026 The mmsched Authors
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
#include <initializer_list>
#include <limits>
#include <numbers>
#include <random>

namespace mmsched {

using Rng = std::mt19937_64;

// Independent random streams. Each simulation concern draws from its own
// stream so that, for a fixed seed, the realized world does not depend on
// which actions a policy takes.
enum class Stream : std::uint64_t {
  kTopology = 1,
  kSessions = 2,
  kArrivals = 3,
  kFading = 4,
  kSearch = 5,
  kAgent = 6,
  kTraining = 7,
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t state = 0x6A09E667F3BCC909ULL;
  std::uint64_t out = 0;
  for (std::uint64_t p : parts) {
    state ^= p + 0x9E3779B97F4A7C15ULL + (state << 6) + (state >> 2);
    out = splitmix64(state);
  }
  return out;
}

inline Rng make_rng(std::initializer_list<std::uint64_t> parts) {
  return Rng(mix_seed(parts));
}

// Small counter-style generator for per-(seed, ue, tti) draws where seeding a
// Mersenne twister would dominate the cost.
class SplitMix {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return splitmix64(state_); }

  // Uniform on (0, 1].
  double uniform() {
    return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal pair by Box-Muller.
  std::pair<double, double> normal_pair() {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    return {r * std::cos(phi), r * std::sin(phi)};
  }

 private:
  std::uint64_t state_;
};

}  // namespace mmsched
