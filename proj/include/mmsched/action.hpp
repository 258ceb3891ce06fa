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

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmsched/scheduling.hpp"

namespace mmsched {

inline constexpr int kPriorityOptions = 4;
inline constexpr int kAllocOptions = 9;
inline constexpr int kPrecoderOptions = 3;
inline constexpr int kActionCount =
    kPriorityOptions * kAllocOptions * kPrecoderOptions;

using ContinuousAction = std::array<double, 3>;

// One of the 108 (prioritizer, allocator, precoder) combinations. Indices
// follow the option order CQI/Delay/Remain/FIFO; FSO, MinG25..100, PF25..100;
// AS/CE/ACE.
struct ActionTriple {
  int c1 = 0;
  int c2 = 0;
  int c3 = 0;

  PriorityMethod priority() const;
  AllocMethod allocation() const;
  PrecoderKind precoder() const;

  int index() const { return (c1 * kAllocOptions + c2) * kPrecoderOptions + c3; }
  static ActionTriple from_index(int index);
  bool valid() const;

  friend bool operator==(const ActionTriple&, const ActionTriple&) = default;
};

// Maps a continuous action to its discrete triple: each axis of [-1, 1] is cut
// into equal-width bins (4, 9, 3); the upper edge belongs to the last bin.
// Out-of-range components are clipped first.
ActionTriple embed(const ContinuousAction& a);

// Bin centres of the triple; embed(center(t)) == t.
ContinuousAction center(const ActionTriple& t);

int embed_axis(double value, int bins);

// "CQI-MinG75-AS" style names.
std::string action_name(const ActionTriple& t);
std::optional<ActionTriple> parse_action(std::string_view name);
std::vector<std::string> all_action_names();

}  // namespace mmsched
