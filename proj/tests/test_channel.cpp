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

#include <cmath>
#include <numeric>

#include "mmsched/channel.hpp"
#include "mmsched/env.hpp"
#include "support/oracles.hpp"

using namespace mmsched;

TEST(Topology, PointsStayInsideTheCell) {
  const Topology t = generate_topology(7, 100.0, 500);
  ASSERT_EQ(t.size(), 500u);
  for (UeId k = 0; k < 500; ++k) EXPECT_LE(t.distance(k), 100.0);
}

TEST(Topology, SameSeedSameLayout) {
  const Topology a = generate_topology(3, 100.0, 50);
  const Topology b = generate_topology(3, 100.0, 50);
  for (std::size_t k = 0; k < 50; ++k) {
    EXPECT_EQ(a.ue_positions[k].x, b.ue_positions[k].x);
    EXPECT_EQ(a.ue_positions[k].y, b.ue_positions[k].y);
  }
}

TEST(Topology, UniformOverTheDisk) {
  // Half the area lies inside radius R/sqrt(2).
  const Topology t = generate_topology(11, 100.0, 20000);
  int inside = 0;
  for (UeId k = 0; k < 20000; ++k) inside += t.distance(k) < 100.0 / std::sqrt(2.0);
  EXPECT_NEAR(inside / 20000.0, 0.5, 0.02);
}

TEST(Topology, EmptySystemRejectedByConfig) {
  EnvConfig c;
  c.total_ues = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(PathLoss, FreeSpaceAnchorAtCarrier) {
  // 20 log10(4 pi f / c) at 3.5 GHz.
  EXPECT_NEAR(free_space_loss_1m_db(3.5e9), 43.32, 0.01);
}

TEST(PathLoss, LogDistanceSlope) {
  ChannelParams p;
  EXPECT_NEAR(pathloss_db(p, 20.0) - pathloss_db(p, 10.0),
              35.0 * std::log10(2.0), 1e-12);
  p.extra_loss_db = 10.0;
  ChannelParams q;
  EXPECT_NEAR(pathloss_db(p, 50.0) - pathloss_db(q, 50.0), 10.0, 1e-12);
}

TEST(Noise, ThermalFloor) {
  // -174 dBm/Hz + 73 dB (20 MHz) + 7 dB = -94 dBm.
  EXPECT_NEAR(to_db(thermal_noise_watts(20e6, 7.0)) + 30.0, -93.99, 0.01);
  EXPECT_NEAR(dbm_to_watts(24.0), 0.251188643, 1e-9);
}

namespace {

Topology two_points(double d1, double d2) {
  Topology t;
  t.cell_radius = 1000.0;
  t.ue_positions = {{d1, 0.0}, {0.0, d2}};
  return t;
}

double mean_row_power(double d1, double d2, int ue, int draws) {
  ChannelParams p;
  p.fading_correlation = 0.0;
  ChannelModel model(two_points(d1, d2), p, 8, 5);
  const std::vector<UeId> both = {0, 1};
  double total = 0.0;
  for (int t = 0; t < draws; ++t) {
    total += model.realize(both, t).entries.row(ue).squaredNorm();
  }
  return total / draws;
}

}  // namespace

TEST(Fading, EqualDistanceEqualPower) {
  const double a = mean_row_power(40.0, 40.0, 0, 10000);
  const double b = mean_row_power(40.0, 40.0, 1, 10000);
  EXPECT_NEAR(a / b, 1.0, 0.03);
}

TEST(Fading, DoubledDistanceFollowsExponent) {
  const double near = mean_row_power(20.0, 40.0, 0, 10000);
  const double far = mean_row_power(20.0, 40.0, 1, 10000);
  EXPECT_NEAR(far / near, std::pow(2.0, -3.5), 0.05 * std::pow(2.0, -3.5));
}

TEST(Fading, MeanPowerMatchesPathLoss) {
  ChannelParams p;
  const double expected = 8.0 * pathloss_gain(p, 20.0);
  EXPECT_NEAR(mean_row_power(20.0, 40.0, 0, 10000) / expected, 1.0, 0.03);
}

namespace {

double lag_one_autocorrelation(double rho, int ttis) {
  ChannelParams p;
  p.fading_correlation = rho;
  ChannelModel model(two_points(10.0, 10.0), p, 1, 9);
  const std::vector<UeId> one = {0};
  std::vector<Complex> x;
  for (int t = 0; t < ttis; ++t) x.push_back(model.realize(one, t).entries(0, 0));
  Complex num(0.0, 0.0);
  double den = 0.0;
  for (int t = 0; t + 1 < ttis; ++t) num += x[t + 1] * std::conj(x[t]);
  for (int t = 0; t < ttis; ++t) den += std::norm(x[t]);
  return std::abs(num) / den;
}

}  // namespace

TEST(Fading, UncorrelatedWhenCoefficientZero) {
  EXPECT_LT(lag_one_autocorrelation(0.0, 10000), 0.05);
}

TEST(Fading, LagOneCorrelationMatchesCoefficient) {
  EXPECT_NEAR(lag_one_autocorrelation(0.9, 20000), 0.9, 0.03);
}

TEST(Fading, RowsDoNotDependOnOtherActiveUes) {
  Topology t = generate_topology(1, 100.0, 4);
  ChannelModel a(t, ChannelParams{}, 8, 3);
  ChannelModel b(t, ChannelParams{}, 8, 3);
  const std::vector<UeId> all = {0, 1, 2, 3};
  const std::vector<UeId> some = {2};
  for (Tti tti = 0; tti < 5; ++tti) {
    const ChannelMatrix ha = a.realize(all, tti);
    const ChannelMatrix hb = b.realize(some, tti);
    EXPECT_TRUE(ha.entries.row(2).isApprox(hb.entries.row(0), 0.0));
  }
}

TEST(Fading, OneShotMatchesModel) {
  Topology t = generate_topology(1, 100.0, 3);
  const std::vector<UeId> ues = {0, 2};
  ChannelModel m(t, ChannelParams{}, 4, 8);
  const ChannelMatrix a = m.realize(ues, 0);
  const ChannelMatrix b = realize_channel(t, ues, 0, 8, ChannelParams{}, 4);
  EXPECT_EQ(a.entries, b.entries);
}

TEST(Channel, SelectReordersRows) {
  Topology t = generate_topology(2, 100.0, 3);
  ChannelModel m(t, ChannelParams{}, 4, 1);
  const std::vector<UeId> ues = {0, 1, 2};
  const ChannelMatrix h = m.realize(ues, 0);
  const std::vector<UeId> pick = {2, 0};
  const ChannelMatrix s = h.select(pick);
  EXPECT_EQ(s.entries.row(0), h.entries.row(2));
  EXPECT_EQ(s.entries.row(1), h.entries.row(0));
  const std::vector<UeId> missing = {7};
  EXPECT_THROW(h.select(missing), StructuralError);
}

TEST(Sinr, SingleUserUnitGain) {
  CMatrix h(1, 1), p(1, 1);
  h(0, 0) = 1.0;
  p(0, 0) = 1.0;
  EXPECT_DOUBLE_EQ(sinr(h, p, 1.0, 1.0)[0], 1.0);
}

TEST(Sinr, OrthogonalColumnsHaveNoInterference) {
  CMatrix h = CMatrix::Zero(2, 2), p = CMatrix::Zero(2, 2);
  h(0, 0) = 2.0;
  h(1, 1) = Complex(0.0, 1.0);
  p(0, 0) = 0.5;
  p(1, 1) = 0.25;
  const auto s = sinr(h, p, 4.0, 0.5);
  EXPECT_DOUBLE_EQ(s[0], (4.0 / 2.0) * 1.0 / 0.5);
  EXPECT_DOUBLE_EQ(s[1], (4.0 / 2.0) * 0.0625 / 0.5);
}

TEST(Sinr, MatchesTermByTermOracle) {
  oracle::Gen g(42);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = g.integer(1, 6);
    const int m = g.integer(k, 16);
    const CMatrix h = g.cmatrix(k, m);
    const CMatrix p = g.cmatrix(m, k, 0.3);
    const double rho = g.uniform(0.01, 10.0);
    const double sigma2 = g.uniform(0.01, 2.0);
    const auto got = sinr(h, p, rho, sigma2);
    const auto want = oracle::sinr(h, p, rho, sigma2);
    for (int i = 0; i < k; ++i) {
      EXPECT_NEAR(got[i], want[i], 1e-12 * std::abs(want[i]));
    }
  }
}

TEST(Sinr, DimensionMismatchThrows) {
  CMatrix h = CMatrix::Ones(2, 4);
  CMatrix p = CMatrix::Ones(3, 2);
  EXPECT_THROW(sinr(h, p, 1.0, 1.0), StructuralError);
}

TEST(Rate, ShannonValues) {
  EXPECT_DOUBLE_EQ(rate(1.0, 20e6), 20e6);
  EXPECT_DOUBLE_EQ(rate(0.0, 5.0), 0.0);
  EXPECT_DOUBLE_EQ(rate(3.0, 1.0), 2.0);
  EXPECT_ANY_THROW(rate(-1.0, 1.0));
  EXPECT_ANY_THROW(rate(std::nan(""), 1.0));
}

TEST(Cqi, BoundariesAndSaturation) {
  EXPECT_EQ(cqi_map(-10.0), 0);
  EXPECT_EQ(cqi_map(-6.0), 1);
  EXPECT_EQ(cqi_map(-6.0001), 0);
  EXPECT_EQ(cqi_map(22.1), 15);
  EXPECT_EQ(cqi_map(100.0), 15);
}

TEST(Cqi, MatchesThresholdTable) {
  // Level i >= 1 starts at -6 + 2(i - 1) dB; scan a fine grid.
  for (int step = -2000; step <= 4000; ++step) {
    const double db = step * 0.01;
    int want = 0;
    for (int i = 1; i <= 15; ++i) {
      if (db >= -6.0 + 2.0 * (i - 1)) want = i;
    }
    ASSERT_EQ(cqi_map(db), want) << db;
  }
}
