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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmsched/config.hpp"
#include "mmsched/ddpg.hpp"
#include "mmsched/env.hpp"
#include "mmsched/stats.hpp"

namespace mmsched {

inline constexpr int kCheckpointVersion = 1;

// The five fixed triples every comparison reports.
const std::vector<std::string>& benchmark_triples();

// A static triple, a named baseline, or a checkpoint file.
struct ResolvedPolicy {
  std::string name;
  std::optional<ActionTriple> triple;
  std::optional<BaselineKind> baseline;
  std::shared_ptr<const DdpgAgent> agent;

  bool is_static() const { return triple.has_value(); }
  bool is_learned() const { return agent != nullptr; }
  std::unique_ptr<Policy> make() const;
};

ResolvedPolicy resolve_policy(const std::string& spec,
                              const ScenarioConfig& config);
ResolvedPolicy learned_policy(std::shared_ptr<const DdpgAgent> agent,
                              std::string name = "learned");

nlohmann::json checkpoint_json(const DdpgAgent& agent,
                               const ScenarioConfig& config,
                               const BufferStats& buffer);
std::shared_ptr<DdpgAgent> load_checkpoint(const std::filesystem::path& path,
                                           const ScenarioConfig& config);

struct RunReport {
  std::string policy;
  std::string scenario;
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  std::vector<double> utilities;    // per seed
  std::vector<double> throughputs;  // per seed, bits/s
  double utility = 0.0;             // mean over seeds
  double throughput = 0.0;
  std::map<std::string, double> action_frequencies;
  std::vector<double> short_term_utilities;  // pooled over seeds
  double wall_clock_s = 0.0;
};

// Runs f(0..n-1) on up to workers threads; the first exception is rethrown.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& f);

struct EvalOptions {
  std::size_t workers = 1;
  // Directory for per-TTI JSON traces, one file per seed; none when empty.
  std::filesystem::path trace_dir;
};

EnvConfig scenario_env(const ScenarioConfig& config,
                       const std::vector<double>& ratios);

RunReport evaluate(const ScenarioConfig& config, const ResolvedPolicy& policy,
                   const std::string& scenario, const EnvConfig& env,
                   const EvalOptions& options = {});

struct CurveRow {
  EpisodeLog log;
  std::size_t epoch = 0;
  std::string block;
};

struct TrainResult {
  std::shared_ptr<DdpgAgent> agent;
  std::vector<CurveRow> curve;
  std::vector<double> epoch_returns;
  std::size_t epochs = 0;
  bool converged = false;
  BufferStats buffer;
};

// A shorter episode of the same system: K scales with the horizon so the
// mean session length and concurrency stay as configured.
EnvConfig shorten_horizon(const EnvConfig& base, Tti horizon);

// Episodic DDPG over training blocks, one episode per block, block order
// reshuffled each epoch. Stops when the epoch-mean return has stayed within
// the plateau tolerance for plateau_epochs epochs, or at max_epochs. On
// divergence a diagnostic checkpoint is written to diagnostic_dir (when set)
// before the error propagates.
TrainResult train(const ScenarioConfig& config,
                  const std::filesystem::path& diagnostic_dir = {},
                  std::ostream* log = nullptr);

struct ComparisonRow {
  std::string scenario;
  std::string policy;
  bool benchmark = false;
  bool best_static = false;
  RunReport report;
};

struct ComparisonTest {
  std::string scenario;
  std::string policy;
  std::string against;
  PairedTest test;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  std::map<std::string, std::string> best_static;  // scenario -> policy
  std::vector<ComparisonTest> tests;  // non-static policies vs best static
};

// Every listed policy plus the benchmark triples on every scenario.
Comparison compare(const ScenarioConfig& config,
                   const std::vector<ResolvedPolicy>& policies,
                   const std::vector<std::string>& scenarios,
                   const EvalOptions& options = {});

struct SweepTrend {
  std::string policy;
  std::vector<double> means;                   // per value
  std::vector<double> per_seed_spearman;       // values vs utility
  std::size_t agreeing = 0;                    // seeds moving as expected
  std::size_t informative = 0;                 // seeds with a defined, non-zero rho
  double sign_p = 1.0;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::kAntennas;
  std::vector<double> values;
  std::vector<RunReport> reports;  // value-major, then policy
  std::vector<SweepTrend> trends;
};

// Applies one sweep value. Antenna sweeps set M; UE sweeps set K and scale
// the average concurrency with it so the mean session length is unchanged.
EnvConfig sweep_env(const EnvConfig& base, SweepAxis axis, double value);

SweepResult sweep(const ScenarioConfig& config,
                  const std::vector<ResolvedPolicy>& policies,
                  const EvalOptions& options = {});

// Writers. Every data file carries the config hash and seed list.
void write_report(const std::filesystem::path& dir, const RunReport& report);
void write_training(const std::filesystem::path& dir,
                    const ScenarioConfig& config, const TrainResult& result);
void write_comparison(const std::filesystem::path& dir,
                      const ScenarioConfig& config, const Comparison& result);
void write_sweep(const std::filesystem::path& dir, const ScenarioConfig& config,
                 const SweepResult& result);
// Re-renders the SVG twin of a figure CSV.
void render_figure_file(const std::filesystem::path& csv,
                        const std::filesystem::path& svg);

std::string file_stem(const std::string& name);

}  // namespace mmsched
