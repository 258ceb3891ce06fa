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
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <ostream>
#include <string>
#include <vector>

#include "mmsched/action.hpp"
#include "mmsched/channel.hpp"
#include "mmsched/common.hpp"
#include "mmsched/precoding.hpp"
#include "mmsched/rng.hpp"
#include "mmsched/scheduling.hpp"
#include "mmsched/traffic.hpp"

namespace mmsched {

struct RewardParams {
  double alpha = 0.5;       // pace penalty weight for GBR classes
  bool clamp_pace = true;   // clamp the pace term (1 - sum/(t GBR)) at zero
};

struct StateParams {
  std::size_t slots = 12;
  double deadline_clip_ttis = 100.0;
  double backlog_scale_bytes = 1e5;
  double antenna_scale = 128.0;
};

struct EnvConfig {
  std::size_t antennas = 16;
  std::size_t total_ues = 60;
  double avg_concurrent_ues = 6.0;
  Tti horizon_ttis = 2000;
  double tti_seconds = 1e-3;
  double bandwidth_hz = 20e6;
  double tx_power_dbm = 24.0;
  std::optional<double> tx_power_watts;  // overrides tx_power_dbm when set
  double cell_radius_m = 100.0;
  ChannelParams channel;
  CeSearchParams search;
  SchedulerParams scheduler;
  RewardParams reward;
  StateParams state;
  std::vector<TrafficType> traffic_types = builtin_traffic_types();
  std::vector<double> type_ratios = {1, 1, 1, 1, 1, 1};
  Tti short_term_window = 100;

  void validate() const;
  double rho_watts() const;
  double noise_watts() const;
  LinkBudget link_budget() const;
  double mean_holding_ttis() const;
};

// Arrival schedule of one UE session.
struct SessionSpec {
  UeId ue = 0;
  std::size_t type_index = 0;
  Tti start_tti = 0;
  Tti end_tti = 0;
};

// Splits total over non-negative ratios by largest remainder.
std::vector<int> apportion_counts(std::span<const double> ratios,
                                  std::size_t total);

// K sessions with start times uniform over the horizon and exponential
// holding times whose mean makes the expected concurrency avg_concurrent_ues.
// Type counts follow type_ratios by largest remainder, in shuffled order.
// UE ids ascend with start time.
std::vector<SessionSpec> generate_sessions(const EnvConfig& config,
                                           std::uint64_t seed);

using StateVector = Eigen::VectorXd;

struct StepOutcome {
  StateVector next_state;
  double reward = 0.0;
  std::vector<std::pair<UeId, double>> ue_rewards;
  std::vector<std::pair<UeId, double>> rates;  // realized rate, scheduled UEs
  std::size_t scheduled = 0;
  int antennas_used = 0;
  double sum_rate = 0.0;
  double max_antenna_gain = 0.0;
  std::size_t expirations = 0;
  bool done = false;
};

// Minimal MDP surface the trainer needs.
class MdpEnvironment {
 public:
  virtual ~MdpEnvironment() = default;
  virtual std::size_t state_dim() const = 0;
  virtual StateVector reset() = 0;
  virtual StepOutcome step(const ActionTriple& action) = 0;
  virtual bool done() const = 0;
};

struct SessionOutcome {
  UeId ue = 0;
  std::size_t type_index = 0;
  Tti end_tti = 0;
  SessionUtility utility;
};

struct EpisodeMetrics {
  double normalized_utility = 0.0;
  double throughput_bps = 0.0;   // mean over TTIs of the summed user rate
  std::vector<double> short_term_utilities;
  std::map<std::string, std::uint64_t> action_counts;
  std::size_t sessions = 0;
  std::size_t vacuous_sessions = 0;
  double total_reward = 0.0;
  Tti ttis = 0;
};

// r_{k,t} = (nu/|D| - 1)(1 + alpha (1 - sum Phi / (t GBR))) with alpha = 0 for
// non-GBR classes and t the session's active TTIs. Zero while nothing has
// been generated.
double ue_reward(const UeSession& session, const RewardParams& params);

// The downlink world: sessions, fading, scheduling pipeline and reward.
class Environment final : public MdpEnvironment {
 public:
  Environment(EnvConfig config, std::uint64_t seed);
  Environment(EnvConfig config, std::uint64_t seed,
              std::vector<SessionSpec> sessions);

  std::size_t state_dim() const override;
  StateVector reset() override;
  StepOutcome step(const ActionTriple& action) override;
  bool done() const override { return done_; }

  // Per-slot features in ascending UE id: CQI, log backlog, head-of-line
  // deadline margin, traffic-class one-hot, GBR deficit; then the active UE
  // count over 4 K_r (capped at 1) and M over the antenna scale.
  StateVector observe() const;

  // Components 1 and 2 for a triple; the plan carries the component-3 choice.
  SchedulePlan plan(const ActionTriple& action) const;
  // Runs precoding, delivery, expiry and reward for a plan and advances.
  StepOutcome execute(const SchedulePlan& plan, const std::string& label);

  const SchedulingContext& context() const { return ctx_; }
  const EnvConfig& config() const { return config_; }
  Tti tti() const { return tti_; }
  const std::vector<SessionOutcome>& outcomes() const { return outcomes_; }
  const std::vector<UeSession>& sessions() const { return sessions_; }
  const ChannelMatrix& channel() const { return channel_; }
  EpisodeMetrics metrics() const;

  // JSON line per TTI when set.
  void set_trace(std::ostream* trace) { trace_ = trace; }

 private:
  void begin_tti();
  void finalize(UeSession& session, Tti end_tti);

  EnvConfig config_;
  std::uint64_t seed_;
  std::vector<SessionSpec> specs_;
  Topology topology_;
  std::optional<ChannelModel> channel_model_;
  std::vector<UeSession> sessions_;
  std::vector<Rng> arrival_rng_;
  std::vector<UeId> active_;
  std::size_t next_spec_ = 0;
  PfHistory pf_;
  Tti tti_ = 0;
  bool done_ = false;
  ChannelMatrix channel_;
  SchedulingContext ctx_;
  std::vector<SessionOutcome> outcomes_;
  std::size_t pending_expirations_ = 0;
  double rate_sum_ = 0.0;
  double reward_sum_ = 0.0;
  std::map<std::string, std::uint64_t> action_counts_;
  std::ostream* trace_ = nullptr;
};

// Picks the plan for the environment's current TTI and names the action.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual SchedulePlan decide(const Environment& env, const StateVector& state,
                              std::string& label) = 0;
};

class StaticPolicy final : public Policy {
 public:
  explicit StaticPolicy(ActionTriple action) : action_(action) {}
  std::string name() const override { return action_name(action_); }
  SchedulePlan decide(const Environment& env, const StateVector& state,
                      std::string& label) override;

 private:
  ActionTriple action_;
};

enum class BaselineKind { kOrfa, kUblaa, kLwdfPf };

class BaselinePolicy final : public Policy {
 public:
  explicit BaselinePolicy(BaselineKind kind) : kind_(kind) {}
  std::string name() const override;
  SchedulePlan decide(const Environment& env, const StateVector& state,
                      std::string& label) override;

 private:
  BaselineKind kind_;
};

std::optional<BaselineKind> parse_baseline(std::string_view name);
std::vector<std::string> baseline_names();

// Runs the environment from reset to its horizon under a policy.
EpisodeMetrics run_episode(Environment& env, Policy& policy);

// Mean utility of sessions grouped by end TTI into fixed windows.
std::vector<double> short_term_utilities(std::span<const SessionOutcome> outcomes,
                                         Tti window);

}  // namespace mmsched
