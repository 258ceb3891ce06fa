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

#include "mmsched/action.hpp"

#include <algorithm>
#include <cmath>

namespace mmsched {

namespace {

constexpr std::array<const char*, kPriorityOptions> kPriorityNames = {
    "CQI", "Delay", "Remain", "FIFO"};
constexpr std::array<const char*, kAllocOptions> kAllocNames = {
    "FSO", "MinG25", "MinG50", "MinG75", "MinG100",
    "PF25", "PF50", "PF75", "PF100"};
constexpr std::array<const char*, kPrecoderOptions> kPrecoderNames = {
    "AS", "CE", "ACE"};

}  // namespace

PriorityMethod ActionTriple::priority() const {
  return static_cast<PriorityMethod>(c1);
}

AllocMethod ActionTriple::allocation() const {
  if (c2 == 0) return {AllocFamily::kFso, 1.0};
  const double iota = 0.25 * ((c2 - 1) % 4 + 1);
  return {c2 <= 4 ? AllocFamily::kMinG : AllocFamily::kPf, iota};
}

PrecoderKind ActionTriple::precoder() const {
  return static_cast<PrecoderKind>(c3);
}

ActionTriple ActionTriple::from_index(int index) {
  ActionTriple t;
  t.c3 = index % kPrecoderOptions;
  t.c2 = (index / kPrecoderOptions) % kAllocOptions;
  t.c1 = index / (kPrecoderOptions * kAllocOptions);
  return t;
}

bool ActionTriple::valid() const {
  return c1 >= 0 && c1 < kPriorityOptions && c2 >= 0 && c2 < kAllocOptions &&
         c3 >= 0 && c3 < kPrecoderOptions;
}

int embed_axis(double value, int bins) {
  if (std::isnan(value)) value = 0.0;
  const double v = std::clamp(value, -1.0, 1.0);
  const int bin = static_cast<int>(std::floor((v + 1.0) * 0.5 * bins));
  return std::min(bin, bins - 1);
}

ActionTriple embed(const ContinuousAction& a) {
  return {embed_axis(a[0], kPriorityOptions), embed_axis(a[1], kAllocOptions),
          embed_axis(a[2], kPrecoderOptions)};
}

ContinuousAction center(const ActionTriple& t) {
  auto mid = [](int bin, int bins) { return -1.0 + (2.0 * bin + 1.0) / bins; };
  return {mid(t.c1, kPriorityOptions), mid(t.c2, kAllocOptions),
          mid(t.c3, kPrecoderOptions)};
}

std::string action_name(const ActionTriple& t) {
  return std::string(kPriorityNames.at(static_cast<std::size_t>(t.c1))) + "-" +
         kAllocNames.at(static_cast<std::size_t>(t.c2)) + "-" +
         kPrecoderNames.at(static_cast<std::size_t>(t.c3));
}

std::optional<ActionTriple> parse_action(std::string_view name) {
  for (int i = 0; i < kActionCount; ++i) {
    const ActionTriple t = ActionTriple::from_index(i);
    if (action_name(t) == name) return t;
  }
  return std::nullopt;
}

std::vector<std::string> all_action_names() {
  std::vector<std::string> names;
  names.reserve(kActionCount);
  for (int i = 0; i < kActionCount; ++i) {
    names.push_back(action_name(ActionTriple::from_index(i)));
  }
  return names;
}

}  // namespace mmsched
