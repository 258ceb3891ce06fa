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
#include <numeric>
#include <set>

#include "mmsched/scheduling.hpp"
#include "support/oracles.hpp"

using namespace mmsched;

namespace {

// Owns sessions and hands out the pointer view schedulers consume.
struct World {
  std::vector<UeSession> sessions;
  LinkQuality link;

  UeSession& add(UeId ue, char type = 'E', int packets = 1, Tti arrival = 0) {
    UeSession s;
    s.ue_id = ue;
    s.type_index = static_cast<std::size_t>(type - 'A');
    s.type = builtin_traffic_types()[s.type_index];
    s.tti_seconds = 1e-3;
    const Tti window = latency_ttis(s.type, 1e-3);
    for (int i = 0; i < packets; ++i) {
      Packet p;
      p.id = static_cast<std::uint64_t>(i);
      p.size_bytes = s.type.packet_bytes;
      p.arrival_tti = arrival;
      p.deadline_tti = arrival + window;
      s.queue.push_back(p);
    }
    s.generated = static_cast<std::uint64_t>(packets);
    sessions.push_back(std::move(s));
    link.ue_ids.push_back(ue);
    link.sinr.push_back(1.0);
    link.cqi.push_back(1);
    return sessions.back();
  }

  std::vector<const UeSession*> view() const {
    std::vector<const UeSession*> v;
    for (const auto& s : sessions) v.push_back(&s);
    return v;
  }

  SchedulingContext context(int antennas, Tti tti = 0) const {
    SchedulingContext ctx;
    ctx.tti = tti;
    ctx.antennas = antennas;
    ctx.sessions = view();
    ctx.link = link;
    ctx.budget = LinkBudget{1.0, 1.0, 1e6};
    for (const auto& s : sessions) ctx.channel_gains[s.ue_id] = 1.0;
    return ctx;
  }
};

// Estimator giving each UE \p per_antenna[ue] bits/s per antenna.
RateEstimate linear(std::map<UeId, double> per_antenna) {
  return [per_antenna](UeId ue, int n) { return per_antenna.at(ue) * n; };
}

}  // namespace

TEST(Prioritize, CqiWithIdTieBreak) {
  World w;
  const int cqi[] = {3, 9, 9, 1};
  for (UeId ue = 0; ue < 4; ++ue) {
    w.add(ue);
    w.link.cqi[ue] = cqi[ue];
  }
  const auto v = w.view();
  EXPECT_EQ(prioritize(PriorityMethod::kCqi, v, w.link, 0),
            (OrderedUeSet{1, 2, 0, 3}));
}

TEST(Prioritize, DelayPutsNearerDeadlineFirst) {
  World w;
  w.add(0, 'E', 1, 0).queue.front().deadline_tti = 30;
  w.add(1, 'E', 1, 0).queue.front().deadline_tti = 2;
  const auto v = w.view();
  EXPECT_EQ(prioritize(PriorityMethod::kDelay, v, w.link, 0), (OrderedUeSet{1, 0}));
}

TEST(Prioritize, RemainCountsOutstandingPackets) {
  World w;
  w.add(0, 'E', 2);
  w.add(1, 'E', 10);
  const auto v = w.view();
  EXPECT_EQ(prioritize(PriorityMethod::kRemain, v, w.link, 0), (OrderedUeSet{1, 0}));
}

TEST(Prioritize, FifoUsesEarliestArrival) {
  World w;
  w.add(0, 'E', 1, 7);
  w.add(1, 'E', 1, 3);
  const auto v = w.view();
  EXPECT_EQ(prioritize(PriorityMethod::kFifo, v, w.link, 10), (OrderedUeSet{1, 0}));
}

TEST(Prioritize, IsAPermutationOfBackloggedUes) {
  oracle::Gen g(1);
  for (int trial = 0; trial < 300; ++trial) {
    World w;
    std::set<UeId> backlogged;
    const int n = g.integer(0, 8);
    for (int i = 0; i < n; ++i) {
      const int packets = g.integer(0, 3);
      UeSession& s = w.add(static_cast<UeId>(i * 3), 'A', packets, g.integer(0, 5));
      w.link.cqi.back() = g.integer(0, 15);
      if (packets > 0) backlogged.insert(s.ue_id);
    }
    const auto v = w.view();
    for (int m = 0; m < 4; ++m) {
      const OrderedUeSet o = prioritize(static_cast<PriorityMethod>(m), v, w.link, 5);
      EXPECT_EQ(std::set<UeId>(o.begin(), o.end()), backlogged);
      EXPECT_EQ(o.size(), backlogged.size());
    }
  }
}

TEST(FullSatisfy, Examples) {
  auto est = [](int n) { return n * 1600.0 / 1e-3; };
  EXPECT_EQ(n_fullsatisfy(0.0, est, 1e-3, 16).antennas, 0);
  const FullSatisfy one = n_fullsatisfy(8.0 * 200, est, 1e-3, 16);
  EXPECT_EQ(one.antennas, 1);
  EXPECT_FALSE(one.saturated);
  EXPECT_EQ(n_fullsatisfy(8.0 * 201, est, 1e-3, 16).antennas, 2);
  const FullSatisfy big = n_fullsatisfy(1e12, est, 1e-3, 16);
  EXPECT_EQ(big.antennas, 16);
  EXPECT_TRUE(big.saturated);
}

TEST(FullSatisfy, MatchesLinearScan) {
  oracle::Gen g(2);
  for (int trial = 0; trial < 500; ++trial) {
    const double slope = g.uniform(1e3, 1e7);
    auto est = [&](int n) { return slope * std::log2(1.0 + n); };
    const double bits = g.uniform(0.0, 1e5);
    const int m = g.integer(1, 32);
    int want = 0;
    for (int n = 1; n <= m && bits > 0.0; ++n) {
      if (est(n) * 1e-3 >= bits) {
        want = n;
        break;
      }
    }
    const FullSatisfy got = n_fullsatisfy(bits, est, 1e-3, m);
    if (bits > 0.0 && want == 0) {
      EXPECT_TRUE(got.saturated);
      EXPECT_EQ(got.antennas, m);
    } else {
      EXPECT_EQ(got.antennas, want);
    }
  }
}

TEST(Fso, PartialGrantWhereBudgetRunsOut) {
  World w;
  for (UeId ue = 0; ue < 3; ++ue) w.add(ue, 'A', 3);  // 4800 bits each
  const auto v = w.view();
  const auto est = linear({{0, 1.6e6}, {1, 1.6e6}, {2, 1.6e6}});
  const auto a = allocate_fso({0, 1, 2}, v, 8, est, 1e-3);
  EXPECT_EQ(a.counts, (std::vector<int>{3, 3, 2}));
}

TEST(Fso, FirstUeSaturatesArray) {
  World w;
  w.add(0, 'F', 100);
  w.add(1, 'F', 1);
  const auto v = w.view();
  const auto a = allocate_fso({0, 1}, v, 8, linear({{0, 1e3}, {1, 1e3}}), 1e-3);
  EXPECT_EQ(a.ues, std::vector<UeId>{0});
  EXPECT_EQ(a.counts, std::vector<int>{8});
}

TEST(Fso, EmptyOrder) {
  World w;
  const auto v = w.view();
  EXPECT_TRUE(allocate_fso({}, v, 8, linear({}), 1e-3).empty());
}

TEST(Fso, MatchesExhaustivePrefixOracle) {
  oracle::Gen g(3);
  for (int trial = 0; trial < 300; ++trial) {
    World w;
    const int n = g.integer(1, 4);
    const int m = g.integer(1, 8);
    std::map<UeId, double> rates;
    OrderedUeSet order;
    for (int i = 0; i < n; ++i) {
      w.add(static_cast<UeId>(i), 'A', g.integer(1, 4));
      rates[static_cast<UeId>(i)] = 1.6e6 * g.integer(1, 2);
      order.push_back(static_cast<UeId>(i));
    }
    const auto v = w.view();
    const auto est = linear(rates);
    const auto a = allocate_fso(order, v, m, est, 1e-3);
    // Oracle: largest prefix of O_t that can be fully satisfied within m.
    int used = 0, prefix = 0;
    for (int i = 0; i < n; ++i) {
      const double bits = w.sessions[static_cast<std::size_t>(i)].remaining_bits();
      int need = 1;
      while (est(static_cast<UeId>(i), need) * 1e-3 < bits) ++need;
      if (used + need > m) break;
      used += need;
      ++prefix;
    }
    int satisfied = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double bits = w.sessions[a.ues[i]].remaining_bits();
      if (est(a.ues[i], a.counts[i]) * 1e-3 >= bits) ++satisfied;
    }
    EXPECT_EQ(satisfied, prefix);
    EXPECT_LE(a.total(), m);
  }
}

TEST(MinG, HalfTheArrayToTwoUes) {
  World w;
  // 4 antennas clear one packet of 6400 bits at 1.6e6 bits/s per antenna.
  for (UeId ue = 0; ue < 4; ++ue) w.add(ue, 'A', 4);
  const auto v = w.view();
  const auto est = linear({{0, 1.6e6}, {1, 1.6e6}, {2, 1.6e6}, {3, 1.6e6}});
  const auto a = allocate_ming({0, 1, 2, 3}, v, 16, est, 1e-3, 0.5);
  ASSERT_GE(a.size(), 2u);
  EXPECT_EQ(a.counts[0], 4);
  EXPECT_EQ(a.counts[1], 4);
  // FSO serves the rest from the remaining 8.
  EXPECT_EQ(a.counts, (std::vector<int>{4, 4, 4, 4}));
}

TEST(MinG, WholeArrayNeedGivesOneUe) {
  World w;
  w.add(0, 'F', 100);
  w.add(1, 'F', 100);
  const auto v = w.view();
  const auto a = allocate_ming({0, 1}, v, 8, linear({{0, 1e3}, {1, 1e3}}), 1e-3, 1.0);
  EXPECT_EQ(a.counts, std::vector<int>{8});
}

TEST(MinG, UniformNeedsSplitEvenly) {
  World w;
  for (UeId ue = 0; ue < 6; ++ue) w.add(ue, 'A', 2);
  const auto v = w.view();
  std::map<UeId, double> r;
  for (UeId ue = 0; ue < 6; ++ue) r[ue] = 1.6e6;
  const auto a = allocate_ming({0, 1, 2, 3, 4, 5}, v, 8, linear(r), 1e-3, 1.0);
  EXPECT_EQ(a.counts, (std::vector<int>{2, 2, 2, 2}));
  EXPECT_EQ(a.total(), 8);
}

TEST(Pf, SymmetricPair) {
  PfHistory h;
  const auto a = allocate_pf({0, 1}, 8, linear({{0, 1.0}, {1, 1.0}}), h, {}, 1.0);
  EXPECT_EQ(a.counts, (std::vector<int>{4, 4}));
}

TEST(Pf, WeightsThreeToOne) {
  PfHistory h;
  const auto a = allocate_pf({0, 1}, 8, linear({{0, 3.0}, {1, 1.0}}), h, {}, 1.0);
  EXPECT_EQ(a.counts, (std::vector<int>{6, 2}));
}

TEST(Pf, QuarterOfEightUes) {
  PfHistory h;
  std::map<UeId, double> r;
  OrderedUeSet o;
  for (UeId ue = 0; ue < 8; ++ue) {
    r[ue] = 1.0;
    o.push_back(ue);
  }
  const auto a = allocate_pf(o, 16, linear(r), h, {}, 0.25);
  EXPECT_EQ(a.size(), 2u);
  EXPECT_EQ(a.total(), 16);
}

TEST(Pf, HistoryIsMovingAverage) {
  PfHistory h;
  h.update(3, 100.0, 0.05);
  EXPECT_DOUBLE_EQ(h.get(3), 5.0);
  h.update(3, 100.0, 0.05);
  EXPECT_DOUBLE_EQ(h.get(3), 0.95 * 5.0 + 5.0);
}

TEST(Apportion, ConservesTotalWithFloorOfOne) {
  oracle::Gen g(4);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = g.integer(1, 8);
    const int total = g.integer(n, 32);
    std::vector<double> w;
    for (int i = 0; i < n; ++i) w.push_back(g.uniform(0.0, 10.0));
    const auto c = apportion(w, total);
    EXPECT_EQ(std::accumulate(c.begin(), c.end(), 0), total);
    EXPECT_GE(*std::min_element(c.begin(), c.end()), 1);
  }
  EXPECT_THROW(apportion(std::vector<double>{1, 1, 1}, 2), StructuralError);
}

TEST(Allocators, NeverExceedTheArray) {
  oracle::Gen g(5);
  for (int trial = 0; trial < 300; ++trial) {
    World w;
    const int n = g.integer(1, 8);
    const int m = g.integer(1, 24);
    OrderedUeSet o;
    for (int i = 0; i < n; ++i) {
      w.add(static_cast<UeId>(i), static_cast<char>('A' + g.integer(0, 5)),
            g.integer(1, 20));
      o.push_back(static_cast<UeId>(i));
    }
    SchedulingContext ctx = w.context(m);
    ctx.budget.rho = g.uniform(0.1, 1e3);
    PfHistory h;
    ctx.pf = &h;
    for (const AllocMethod method :
         {AllocMethod{AllocFamily::kFso, 1.0}, AllocMethod{AllocFamily::kMinG, 0.25},
          AllocMethod{AllocFamily::kMinG, 1.0}, AllocMethod{AllocFamily::kPf, 0.5},
          AllocMethod{AllocFamily::kPf, 1.0}}) {
      const auto a = allocate(method, o, ctx);
      EXPECT_LE(a.total(), m);
      for (int c : a.counts) EXPECT_GE(c, 1);
      if (method.family == AllocFamily::kPf && a.size() <= static_cast<std::size_t>(m)) {
        EXPECT_EQ(a.total(), m);
      }
    }
    for (auto plan : {baseline_orfa(ctx), baseline_ublaa(ctx), baseline_lwdf_pf(ctx)}) {
      EXPECT_LE(plan.allocation.total(), m);
      for (int c : plan.allocation.counts) EXPECT_GE(c, 1);
    }
  }
}

TEST(Baselines, OrfaSplitsEvenlyOnSymmetricUes) {
  World w;
  for (UeId ue = 0; ue < 4; ++ue) w.add(ue, 'E', 5);
  const SchedulePlan p = baseline_orfa(w.context(8));
  EXPECT_EQ(p.allocation.counts, (std::vector<int>{2, 2, 2, 2}));
  EXPECT_EQ(p.precoder, PrecoderKind::kMmseAs);
}

TEST(Baselines, UblaaServesUeAboutToLoseFirst) {
  World w;
  w.add(0, 'E', 5, 0);
  UeSession& urgent = w.add(1, 'E', 5, 0);
  urgent.queue.front().deadline_tti = 10;
  urgent.generated = 1000;
  urgent.delivered = 994;
  urgent.expired = 1;
  const SchedulePlan p = baseline_ublaa(w.context(1, 10));
  ASSERT_EQ(p.order.size(), 1u);
  EXPECT_EQ(p.order.front(), 1u);
  EXPECT_EQ(p.precoder, PrecoderKind::kAs);
}

TEST(Baselines, LwdfRanksUeAtDeadlineFirst) {
  World w;
  w.add(0, 'E', 1, 50);
  w.add(1, 'E', 1, 0);  // deadline 100
  w.add(2, 'E', 1, 30);
  const SchedulePlan p = baseline_lwdf_pf(w.context(8, 99));
  EXPECT_EQ(p.order.front(), 1u);
  EXPECT_EQ(p.precoder, PrecoderKind::kAce);
}
