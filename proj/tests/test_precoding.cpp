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

#include "mmsched/precoding.hpp"
#include "support/oracles.hpp"

using namespace mmsched;

namespace {

ChannelMatrix wrap(const CMatrix& h) {
  ChannelMatrix c;
  c.entries = h;
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    c.ue_index_map.push_back(static_cast<UeId>(r));
  }
  return c;
}

double off_diagonal_ratio(const CMatrix& g) {
  double off = 0.0, on = 0.0;
  for (Eigen::Index k = 0; k < g.rows(); ++k) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      if (j == k) {
        on = std::max(on, std::abs(g(k, j)));
      } else {
        off = std::max(off, std::abs(g(k, j)));
      }
    }
  }
  return off / on;
}

}  // namespace

TEST(ZeroForcing, OrthonormalRowsGiveConjugateTranspose) {
  oracle::Gen g(1);
  const CMatrix q = g.cmatrix(8, 3).householderQr().householderQ() *
                    CMatrix::Identity(8, 3);
  const CMatrix h = q.adjoint();
  const DigitalStage d = zf_baseband(h);
  EXPECT_FALSE(d.regularized);
  EXPECT_TRUE(d.weights.isApprox(h.adjoint(), 1e-12));
}

TEST(ZeroForcing, NullsInterferenceOnWideChannels) {
  oracle::Gen g(2);
  for (int trial = 0; trial < 200; ++trial) {
    const CMatrix h = g.cmatrix(3, 8);
    const DigitalStage d = zf_baseband(h);
    EXPECT_LE(off_diagonal_ratio(h * d.weights), 1e-9);
  }
}

TEST(ZeroForcing, DuplicatedRowsTakeRegularizedPath) {
  oracle::Gen g(3);
  CMatrix h = g.cmatrix(3, 6);
  h.row(2) = h.row(0);
  const DigitalStage d = zf_baseband(h);
  EXPECT_TRUE(d.regularized);
  EXPECT_TRUE(d.weights.allFinite());
}

TEST(Mmse, ApproachesZeroForcingAsLambdaVanishes) {
  oracle::Gen g(4);
  const CMatrix h = g.cmatrix(3, 3);
  const DigitalStage zf = zf_baseband(h);
  const DigitalStage mmse = mmse_baseband(h, 1e-12);
  EXPECT_TRUE(mmse.weights.isApprox(zf.weights, 1e-6));
}

TEST(GainBound, FeasibleUnchangedAndInfeasibleScaledExactly) {
  PrecodingMatrix p;
  p.entries = CMatrix::Zero(2, 2);
  p.entries(0, 0) = 0.5;
  p.entries(1, 1) = Complex(0.0, 0.25);
  EXPECT_EQ(normalize_gain(p).entries, p.entries);

  p.entries(0, 1) = 1.5;  // row 0 sums to 2
  const PrecodingMatrix q = normalize_gain(p);
  EXPECT_EQ(q.entries, p.entries / 2.0);
  EXPECT_DOUBLE_EQ(max_antenna_gain(q.entries), 1.0);
}

TEST(GainBound, HoldsForEveryHybridOutput) {
  oracle::Gen g(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = g.integer(1, 6);
    const int m = g.integer(k, 16);
    const auto counts = g.counts(k, m);
    const ChannelMatrix h = wrap(g.cmatrix(k, m, g.uniform(1e-6, 10.0)));
    EXPECT_LE(max_antenna_gain(precode_as(h, counts).entries), 1.0 + 1e-9);
  }
}

TEST(SumRate, EqualsSumOfPerUserRates) {
  oracle::Gen g(6);
  const LinkBudget link{2.0, 0.3, 1e6};
  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix h = g.cmatrix(3, 8);
    const CMatrix p = g.cmatrix(8, 3, 0.2);
    double want = 0.0;
    for (double s : sinr(h, p, link.rho, link.sigma2)) {
      want += rate(s, link.bandwidth_hz);
    }
    EXPECT_EQ(sum_rate(h, p, link), want);
  }
}

TEST(SumRate, SingleUserAndOrthogonalPairs) {
  CMatrix h(1, 1), p(1, 1);
  h(0, 0) = 1.0;
  p(0, 0) = 1.0;
  EXPECT_DOUBLE_EQ(sum_rate(h, p, LinkBudget{1.0, 1.0, 1.0}), 1.0);
  CMatrix h2 = CMatrix::Identity(2, 2);
  CMatrix p2 = CMatrix::Identity(2, 2);
  EXPECT_DOUBLE_EQ(sum_rate(h2, p2, LinkBudget{6.0, 1.0, 1.0}),
                   2.0 * std::log2(1.0 + 3.0));
}

TEST(Greedy, SingleUserTakesTheWholeArray) {
  oracle::Gen g(7);
  const ChannelMatrix h = wrap(g.cmatrix(1, 6));
  const std::vector<int> counts = {6};
  const AnalogAssignment a = greedy_assignment(h.entries, counts);
  for (int o : a.owner) EXPECT_EQ(o, 0);
}

TEST(Greedy, DisjointDominantAntennasAreOptimal) {
  CMatrix h = CMatrix::Constant(2, 4, Complex(0.1, 0.0));
  h(0, 0) = 2.0;
  h(0, 1) = Complex(0.0, 2.0);
  h(1, 2) = 2.0;
  h(1, 3) = Complex(0.0, -2.0);
  const std::vector<int> counts = {2, 2};
  const AnalogAssignment a = greedy_assignment(h, counts);
  EXPECT_EQ(a.owner, (std::vector<int>{0, 0, 1, 1}));
  // Exhaustive check over all 4!/(2!2!) assignments.
  const LinkBudget link{1.0, 0.1, 1.0};
  double best = 0.0;
  std::vector<int> best_owner;
  for (const auto& owner : oracle::all_assignments(4, counts)) {
    const double r = oracle::sum_rate(h, oracle::zf_hybrid(h, owner), 1.0, 0.1, 1.0);
    if (r > best) {
      best = r;
      best_owner = owner;
    }
  }
  EXPECT_EQ(best_owner, a.owner);
  EXPECT_NEAR(sum_rate(h, precode_as(wrap(h), counts).entries, link), best,
              1e-9 * best);
}

TEST(Greedy, CountsHonored) {
  oracle::Gen g(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = g.integer(1, 5);
    const int m = g.integer(k, 12);
    const auto counts = g.counts(k, m);
    const AnalogAssignment a = greedy_assignment(g.cmatrix(k, m), counts);
    EXPECT_EQ(a.counts(static_cast<std::size_t>(k)), counts);
  }
}

TEST(Greedy, RejectsOverrun) {
  const std::vector<int> counts = {3, 2};
  EXPECT_THROW(greedy_assignment(CMatrix::Ones(2, 4), counts), StructuralError);
  const std::vector<int> zero = {0, 2};
  EXPECT_THROW(greedy_assignment(CMatrix::Ones(2, 4), zero), StructuralError);
}

TEST(Sampling, ExactCountsAlways) {
  oracle::Gen g(9);
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = g.integer(1, 4);
    const int m = g.integer(k, 10);
    const auto counts = g.counts(k, m);
    AssignmentDistribution d =
        AssignmentDistribution::from_counts(static_cast<std::size_t>(m), counts);
    // Skew the distribution so capacity limits bind.
    d.probabilities.col(0) *= 10.0;
    const AnalogAssignment a = sample_assignment(d, counts, rng);
    EXPECT_EQ(a.counts(static_cast<std::size_t>(k)), counts);
  }
}

TEST(Refit, RowsStayDistributions) {
  const std::vector<int> counts = {2, 1};
  AssignmentDistribution d = AssignmentDistribution::from_counts(4, counts);
  for (Eigen::Index r = 0; r < 4; ++r) {
    EXPECT_NEAR(d.probabilities.row(r).sum(), 1.0, 1e-15);
  }
  std::vector<AnalogAssignment> elites = {{{0, 0, 1, -1}}, {{0, 1, 0, -1}}};
  const std::vector<double> w = {0.5, 0.5};
  refit_distribution(d, elites, w, 0.7);
  for (Eigen::Index r = 0; r < 4; ++r) {
    EXPECT_NEAR(d.probabilities.row(r).sum(), 1.0, 1e-15);
  }
  EXPECT_NEAR(d.probabilities(0, 0), 0.7 * 1.0 + 0.3 * 0.5, 1e-15);
}

TEST(Refit, EqualScoresMatchUniformWeighting) {
  const std::vector<int> counts = {1, 1};
  AssignmentDistribution a = AssignmentDistribution::from_counts(3, counts);
  AssignmentDistribution b = a;
  std::vector<AnalogAssignment> elites = {{{0, 1, -1}}, {{1, -1, 0}}};
  const double s = 7.0;
  const std::vector<double> uniform = {0.5, 0.5};
  const std::vector<double> adaptive = {s / (2 * s), s / (2 * s)};
  refit_distribution(a, elites, uniform, 0.7);
  refit_distribution(b, elites, adaptive, 0.7);
  EXPECT_EQ(a.probabilities, b.probabilities);
}

TEST(CrossEntropy, SingleDrawDegenerates) {
  oracle::Gen g(10);
  const ChannelMatrix h = wrap(g.cmatrix(2, 6));
  const std::vector<int> counts = {2, 2};
  const CeSearchParams p{1, 0, 1, 0.7};
  const SearchResult r =
      cross_entropy_search(h, counts, p, LinkBudget{1.0, 0.1, 1.0}, 4,
                           EliteWeighting::kUniform);
  EXPECT_EQ(r.incumbent_history.size(), 1u);
  EXPECT_EQ(r.assignment.counts(2), counts);
}

TEST(CrossEntropy, BeatsRandomAssignment) {
  const std::vector<int> counts = {2, 2};
  const LinkBudget link{1.0, 0.1, 1.0};
  int wins = 0;
  for (int seed = 0; seed < 100; ++seed) {
    oracle::Gen g(1000 + seed);
    const CMatrix h = g.cmatrix(2, 6);
    const SearchResult r = cross_entropy_search(
        wrap(h), counts, CeSearchParams{}, link, seed, EliteWeighting::kUniform);
    const auto all = oracle::all_assignments(6, counts);
    const auto& pick = all[static_cast<std::size_t>(g.integer(0, static_cast<int>(all.size()) - 1))];
    wins += r.best_sum_rate >= oracle::sum_rate(h, oracle::zf_hybrid(h, pick), 1.0, 0.1, 1.0);
  }
  EXPECT_GE(wins, 95);
}

TEST(CrossEntropy, IncumbentNeverDecreases) {
  oracle::Gen g(11);
  const std::vector<int> counts = {3, 2, 2};
  const SearchResult r = cross_entropy_search(
      wrap(g.cmatrix(3, 12)), counts, CeSearchParams{}, LinkBudget{1.0, 0.1, 1.0},
      5, EliteWeighting::kSumRate);
  for (std::size_t i = 1; i < r.incumbent_history.size(); ++i) {
    EXPECT_GE(r.incumbent_history[i], r.incumbent_history[i - 1]);
  }
}

TEST(CrossEntropy, BestSeenMatchesReturnedPrecoder) {
  oracle::Gen g(12);
  const CMatrix h = g.cmatrix(2, 6);
  const std::vector<int> counts = {2, 3};
  const LinkBudget link{1.0, 0.1, 1.0};
  const SearchResult r = cross_entropy_search(wrap(h), counts, CeSearchParams{},
                                              link, 6, EliteWeighting::kSumRate);
  EXPECT_NEAR(sum_rate(h, r.precoder.entries, link), r.best_sum_rate,
              1e-9 * r.best_sum_rate);
}

TEST(CrossEntropy, SeedFixedRunsAreIdentical) {
  oracle::Gen g(13);
  const ChannelMatrix h = wrap(g.cmatrix(3, 10));
  const std::vector<int> counts = {3, 3, 3};
  const LinkBudget link{1.0, 0.1, 1.0};
  const auto a = precode_ace(h, counts, CeSearchParams{}, link, 99);
  const auto b = precode_ace(h, counts, CeSearchParams{}, link, 99);
  EXPECT_EQ(a.entries, b.entries);
}
