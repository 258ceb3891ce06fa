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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mmsched/env.hpp"
#include "support/oracles.hpp"

using namespace mmsched;

namespace {

EnvConfig small_config() {
  EnvConfig c;
  c.antennas = 8;
  c.total_ues = 12;
  c.avg_concurrent_ues = 3.0;
  c.horizon_ttis = 300;
  return c;
}

UeSession counted(char type, std::uint64_t generated, std::uint64_t delivered,
                  double avg_rate = 0.0, Tti active = 0) {
  UeSession s;
  s.type = builtin_traffic_types()[static_cast<std::size_t>(type - 'A')];
  s.generated = generated;
  s.delivered = delivered;
  s.rate_history = {avg_rate * static_cast<double>(active), active};
  return s;
}

}  // namespace

TEST(Reward, AllDeliveredIsZero) {
  EXPECT_EQ(ue_reward(counted('B', 10, 10, 0.0, 5), {}), 0.0);
}

TEST(Reward, NonGbrHalfOutstanding) {
  EXPECT_DOUBLE_EQ(ue_reward(counted('E', 10, 5), {}), -0.5);
}

TEST(Reward, GbrOnPace) {
  EXPECT_DOUBLE_EQ(ue_reward(counted('A', 10, 4, 0.112e6, 100), {}), 0.4 - 1.0);
}

TEST(Reward, GbrBehindPace) {
  // pace = 1 - 0.5 = 0.5, factor 1 + 0.5 * 0.5.
  EXPECT_DOUBLE_EQ(ue_reward(counted('B', 4, 2, 0.4e6, 10), {}), -0.5 * 1.25);
}

TEST(Reward, ClampKeepsOverAchieversNonPositive) {
  const UeSession s = counted('C', 10, 0, 10 * 0.72e6, 10);
  EXPECT_DOUBLE_EQ(ue_reward(s, {0.5, true}), -1.0);
  EXPECT_DOUBLE_EQ(ue_reward(s, {0.5, false}), -1.0 * (1.0 + 0.5 * (1.0 - 10.0)));
}

TEST(Reward, FuzzBoundsAndZeroSet) {
  oracle::Gen g(1);
  const RewardParams p;
  for (int trial = 0; trial < 10000; ++trial) {
    const char type = static_cast<char>('A' + g.integer(0, 5));
    const auto gen = static_cast<std::uint64_t>(g.integer(1, 500));
    const auto del = static_cast<std::uint64_t>(g.integer(0, static_cast<int>(gen)));
    const UeSession s = counted(type, gen, del, g.uniform(0.0, 2e6), g.integer(0, 100));
    const double r = ue_reward(s, p);
    EXPECT_LE(r, 0.0);
    EXPECT_GE(r, -(1.0 + p.alpha));
    EXPECT_EQ(r == 0.0, del == gen);
  }
}

TEST(Sessions, ApportionCounts) {
  const std::vector<double> r = {3, 3, 3, 1, 1, 1};
  const auto c = apportion_counts(r, 60);
  EXPECT_EQ(c, (std::vector<int>{15, 15, 15, 5, 5, 5}));
  const std::vector<double> one = {0, 1, 0};
  EXPECT_EQ(apportion_counts(one, 7), (std::vector<int>{0, 7, 0}));
}

TEST(Sessions, ScheduleShape) {
  const EnvConfig c = small_config();
  const auto specs = generate_sessions(c, 5);
  ASSERT_EQ(specs.size(), c.total_ues);
  std::vector<int> per_type(6, 0);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    EXPECT_EQ(specs[i].ue, i);
    EXPECT_GE(specs[i].end_tti, specs[i].start_tti);
    if (i > 0) EXPECT_GE(specs[i].start_tti, specs[i - 1].start_tti);
    ++per_type[specs[i].type_index];
  }
  EXPECT_EQ(per_type, std::vector<int>(6, 2));
}

TEST(Sessions, MeanConcurrencyMatchesTarget) {
  EnvConfig c;
  c.total_ues = 60;
  c.avg_concurrent_ues = 6.0;
  c.horizon_ttis = 2000;
  double total = 0.0;
  const int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    for (const auto& spec : generate_sessions(c, static_cast<std::uint64_t>(s))) {
      total += static_cast<double>(std::min<Tti>(spec.end_tti, c.horizon_ttis - 1) -
                                   spec.start_tti + 1);
    }
  }
  // Sessions cut by the horizon lose some occupancy, hence the lower bound.
  const double mean = total / seeds / static_cast<double>(c.horizon_ttis);
  EXPECT_GT(mean, 4.5);
  EXPECT_LT(mean, 6.6);
}

TEST(State, EmptySystemHasZeroSlots) {
  EnvConfig c = small_config();
  Environment env(c, 1, {});
  const StateVector s = env.observe();
  ASSERT_EQ(static_cast<std::size_t>(s.size()), env.state_dim());
  const Eigen::Index slots = static_cast<Eigen::Index>(c.state.slots * 10);
  EXPECT_TRUE(s.head(slots).isZero(0.0));
  EXPECT_DOUBLE_EQ(s[slots + 1], 8.0 / 128.0);
}

TEST(State, SlotFeatures) {
  EnvConfig c = small_config();
  c.tx_power_watts = 1e6;  // CQI 15
  c.state.deadline_clip_ttis = 100;
  c.traffic_types[5].latency_ms = 500;
  Environment env(c, 1, {{0, 5, 0, 300}});
  const UeSession& u = env.sessions()[0];
  // Step with an empty plan until the UE has a packet.
  while (!u.backlogged()) {
    env.execute(SchedulePlan{}, "idle");
  }
  const StateVector s = env.observe();
  EXPECT_DOUBLE_EQ(s[0], 1.0);
  EXPECT_GT(s[1], 0.0);
  EXPECT_DOUBLE_EQ(s[2], 1.0);  // 500 TTIs clipped to 100
  EXPECT_DOUBLE_EQ(s[3 + 5], 1.0);
  EXPECT_DOUBLE_EQ(s[3 + 6], 0.0);  // non-GBR
}

TEST(State, EntriesBoundedOnRandomEpisodes) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Environment env(small_config(), seed);
    Rng rng(seed);
    while (!env.done()) {
      const auto out = env.step(ActionTriple::from_index(
          std::uniform_int_distribution<int>(0, kActionCount - 1)(rng)));
      EXPECT_TRUE(out.next_state.allFinite());
      EXPECT_LE(out.next_state.cwiseAbs().maxCoeff(), 1.0);
    }
  }
}

TEST(Step, RewardIsSumAndConstraintsHold) {
  Environment env(small_config(), 3);
  Rng rng(3);
  while (!env.done()) {
    const auto out = env.step(ActionTriple::from_index(
        std::uniform_int_distribution<int>(0, kActionCount - 1)(rng)));
    double total = 0.0;
    for (const auto& [ue, r] : out.ue_rewards) {
      total += r;
      EXPECT_LE(r, 0.0);
    }
    EXPECT_EQ(out.reward, total);
    EXPECT_LE(out.antennas_used, 8);
    EXPECT_LE(out.max_antenna_gain, 1.0 + 1e-9);
  }
}

TEST(Step, ReplayIsDeterministic) {
  auto run = [] {
    Environment env(small_config(), 11);
    std::ostringstream trace;
    env.set_trace(&trace);
    std::vector<double> rewards;
    int i = 0;
    while (!env.done()) {
      rewards.push_back(env.step(ActionTriple::from_index((i++ * 37) % kActionCount)).reward);
    }
    return std::make_pair(rewards, trace.str());
  };
  EXPECT_EQ(run(), run());
}

TEST(Step, RejectsOverAllocation) {
  Environment env(small_config(), 1, {{0, 4, 0, 100}});
  SchedulePlan p;
  p.allocation.grant(0, 9);
  EXPECT_THROW(env.execute(p, "bad"), StructuralError);
}

TEST(Episode, ZeroPowerGivesZeroUtility) {
  EnvConfig c = small_config();
  c.tx_power_watts = 0.0;
  std::vector<SessionSpec> specs;
  for (UeId ue = 0; ue < 6; ++ue) specs.push_back({ue, ue % 3, 0, 299});
  Environment env(c, 2, specs);
  StaticPolicy p(*parse_action("CQI-FSO-AS"));
  const EpisodeMetrics m = run_episode(env, p);
  EXPECT_EQ(m.normalized_utility, 0.0);
  EXPECT_EQ(m.throughput_bps, 0.0);
}

TEST(Episode, AbundantCapacityGivesFullUtility) {
  EnvConfig c = small_config();
  c.antennas = 64;
  c.total_ues = 6;
  c.avg_concurrent_ues = 1.0;
  c.tx_power_watts = 1e3;
  c.type_ratios = {1, 1, 1, 0, 1, 1};
  Environment env(c, 4);
  StaticPolicy p(*parse_action("CQI-FSO-AS"));
  EXPECT_EQ(run_episode(env, p).normalized_utility, 1.0);
}

TEST(Episode, MetricsBoundsAndActionCounts) {
  EnvConfig c = small_config();
  Environment env(c, 6);
  StaticPolicy p(*parse_action("Delay-PF50-AS"));
  const EpisodeMetrics m = run_episode(env, p);
  EXPECT_GE(m.normalized_utility, 0.0);
  EXPECT_LE(m.normalized_utility, 1.0);
  EXPECT_EQ(m.sessions, c.total_ues);
  EXPECT_EQ(m.ttis, c.horizon_ttis);
  ASSERT_EQ(m.action_counts.size(), 1u);
  EXPECT_EQ(m.action_counts.begin()->second, static_cast<std::uint64_t>(c.horizon_ttis));
  for (double u : m.short_term_utilities) {
    EXPECT_GE(u, 0.0);
    EXPECT_LE(u, 1.0);
  }
}

TEST(Episode, ThroughputBoundedByBestLink) {
  Environment env(small_config(), 8);
  Rng rng(8);
  const LinkBudget b = env.config().link_budget();
  while (!env.done()) {
    double best = 0.0;
    for (const auto& [ue, g] : env.context().channel_gains) {
      // Unit per-antenna amplitude caps the beamforming gain at M.
      best = std::max(best, b.rho * 8.0 * g / b.sigma2);
    }
    const auto out = env.step(*parse_action("CQI-PF100-CE"));
    EXPECT_LE(out.sum_rate,
              static_cast<double>(out.scheduled) * b.bandwidth_hz * std::log2(1.0 + best) + 1e-6);
  }
}

TEST(Episode, UtilityIsSymmetricUnderRelabeling) {
  // Reversing id order of identical-type sessions changes nothing statistically.
  EnvConfig c = small_config();
  c.type_ratios = {0, 0, 0, 0, 1, 0};
  double a = 0.0, b = 0.0;
  const int seeds = 12;
  for (int s = 0; s < seeds; ++s) {
    auto specs = generate_sessions(c, static_cast<std::uint64_t>(s));
    StaticPolicy p(*parse_action("CQI-FSO-AS"));
    Environment e1(c, static_cast<std::uint64_t>(s), specs);
    a += run_episode(e1, p).normalized_utility;
    const UeId top = static_cast<UeId>(specs.size() - 1);
    for (auto& spec : specs) spec.ue = top - spec.ue;
    std::reverse(specs.begin(), specs.end());
    Environment e2(c, static_cast<std::uint64_t>(s) + 1000, specs);
    b += run_episode(e2, p).normalized_utility;
  }
  EXPECT_NEAR(a / seeds, b / seeds, 0.1);
}

TEST(ShortTerm, WindowedMeans) {
  std::vector<SessionOutcome> o(4);
  o[0].end_tti = 5;
  o[0].utility.value = 1;
  o[1].end_tti = 50;
  o[2].end_tti = 150;
  o[2].utility.value = 1;
  o[3].end_tti = 199;
  o[3].utility.value = 1;
  EXPECT_EQ(short_term_utilities(o, 100), (std::vector<double>{0.5, 1.0}));
}
