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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmsched/ddpg.hpp"
#include "mmsched/env.hpp"

namespace mmsched {

// Traffic mixes A:B:C:D:E:F of the six named scenarios S1..S6.
std::vector<double> scenario_ratios(const std::string& name);
std::vector<std::string> scenario_names();

enum class BlockMode { kPerType, kScenario };

struct TrainingSchedule {
  std::uint64_t seed = 1;
  std::size_t max_epochs = 20;
  std::size_t blocks_per_type = 1;
  std::size_t plateau_epochs = 5;
  double plateau_tolerance = 0.01;
  Tti block_horizon_ttis = 0;  // 0 means the system horizon
  BlockMode blocks = BlockMode::kPerType;
};

struct EvaluationSchedule {
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<std::string> policies;
  std::vector<std::string> scenarios;  // empty means the configured mix
};

enum class SweepAxis { kAntennas, kUes };

struct SweepSchedule {
  SweepAxis axis = SweepAxis::kAntennas;
  std::vector<double> values = {8, 16, 24, 32};
  std::vector<std::string> policies = {"CQI-MinG75-AS"};
};

struct ScenarioConfig {
  std::string scenario = "S1";  // label of the configured mix
  EnvConfig env;
  TrainConfig ddpg;
  TrainingSchedule training;
  EvaluationSchedule evaluation;
  SweepSchedule sweep;
  std::string policy = "CQI-MinG75-AS";
  std::size_t workers = 1;
  std::filesystem::path base_dir;  // directory of the config file

  void validate() const;
};

ScenarioConfig default_config();
ScenarioConfig parse_config(const std::string& text,
                            const std::string& origin = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

// Canonical JSON of every setting that influences results.
nlohmann::json to_json(const ScenarioConfig& config);
// 16 hex digits of FNV-1a over the canonical JSON.
std::string config_hash(const ScenarioConfig& config);

std::string to_string(SweepAxis axis);
std::string to_string(BlockMode mode);

}  // namespace mmsched
