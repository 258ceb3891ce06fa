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
#include <span>
#include <vector>

#include "mmsched/channel.hpp"
#include "mmsched/common.hpp"
#include "mmsched/rng.hpp"

namespace mmsched {

// M x |O_t| hybrid precoder. Column k serves UE column_map[k].
struct PrecodingMatrix {
  CMatrix entries;
  std::vector<UeId> column_map;
  bool regularized = false;  // digital stage fell back to Tikhonov inverse
};

// Analog selection network: each antenna feeds at most one RF chain (one per
// scheduled UE). owner[m] is the column served by antenna m, or kUnused.
struct AnalogAssignment {
  static constexpr int kUnused = -1;
  std::vector<int> owner;

  std::size_t antennas() const { return owner.size(); }
  std::vector<int> counts(std::size_t users) const;
  // M x users 0/1 matrix F_RF.
  CMatrix matrix(std::size_t users) const;
  friend bool operator==(const AnalogAssignment&,
                         const AnalogAssignment&) = default;
};

struct CeSearchParams {
  int n_candidates = 64;
  int n_elites = 8;
  int n_iterations = 8;
  double smoothing = 0.7;

  void validate() const;
};

// Transmit power, noise and bandwidth used to score precoders with the
// environment's own rate objective.
struct LinkBudget {
  double rho = 0.0;
  double sigma2 = 1.0;
  double bandwidth_hz = 1.0;
};

struct DigitalStage {
  CMatrix weights;
  bool regularized = false;
};

// Moore-Penrose right inverse of a wide effective channel. Falls back to a
// Tikhonov-regularized inverse (epsilon scaled to the mean row power) when the
// Gram matrix is numerically singular.
DigitalStage zf_baseband(const CMatrix& h_eff, double epsilon = 1e-6);

// Linear MMSE digital stage, H^H (H H^H + lambda I)^-1.
DigitalStage mmse_baseband(const CMatrix& h_eff, double lambda);

// Largest per-antenna amplitude sum, max_m sum_k |p^m_k|.
double max_antenna_gain(const CMatrix& p);

// Scales p by the smallest global factor that makes every per-antenna
// amplitude sum at most one. Feasible or all-zero inputs are returned as is.
PrecodingMatrix normalize_gain(PrecodingMatrix p);

// sum_k W log2(1 + SINR_k) for the rows of h served by the columns of p.
double sum_rate(const CMatrix& h, const CMatrix& p, const LinkBudget& link);

// H F_RF: the K x K channel seen by the digital stage.
CMatrix effective_channel(const CMatrix& h, const AnalogAssignment& analog);

enum class DigitalKind { kZeroForcing, kMmse };

// P = F_RF F_BB with the digital stage computed on the effective channel,
// followed by gain normalization.
PrecodingMatrix hybrid_precoder(const ChannelMatrix& h,
                                const AnalogAssignment& analog,
                                DigitalKind kind = DigitalKind::kZeroForcing,
                                double mmse_lambda = 0.0);

// Greedy antenna selection: repeatedly hands the unassigned antenna/UE pair
// with the largest |h_{k,m}| to UE k while k has budget left.
AnalogAssignment greedy_assignment(const CMatrix& h,
                                   std::span<const int> counts);

// Per-antenna categorical distribution over {UE 0..K-1, unused}.
struct AssignmentDistribution {
  // probabilities(m, c): column c < K is UE c, column K is "unused".
  Eigen::MatrixXd probabilities;

  static AssignmentDistribution from_counts(std::size_t antennas,
                                            std::span<const int> counts);
};

// Draws an assignment honoring the exact per-UE counts. Antennas are visited
// in a random order and each samples among classes with capacity left.
AnalogAssignment sample_assignment(const AssignmentDistribution& dist,
                                   std::span<const int> counts, Rng& rng);

enum class EliteWeighting { kUniform, kSumRate };

struct SearchResult {
  AnalogAssignment assignment;
  PrecodingMatrix precoder;
  double best_sum_rate = 0.0;
  std::vector<double> incumbent_history;  // best-seen after each iteration
};

// Cross-entropy search over analog assignments scored by sum_rate with the
// zero-forcing digital stage. kSumRate weights elites by their normalized
// sum-rate (adaptive CE); kUniform is plain CE.
SearchResult cross_entropy_search(const ChannelMatrix& h,
                                  std::span<const int> counts,
                                  const CeSearchParams& params,
                                  const LinkBudget& link, std::uint64_t seed,
                                  EliteWeighting weighting);

// Refits the distribution to the elites; exposed for tests.
void refit_distribution(AssignmentDistribution& dist,
                        std::span<const AnalogAssignment> elites,
                        std::span<const double> elite_weights,
                        double smoothing);

PrecodingMatrix precode_as(const ChannelMatrix& h, std::span<const int> counts);
PrecodingMatrix precode_ce(const ChannelMatrix& h, std::span<const int> counts,
                           const CeSearchParams& params, const LinkBudget& link,
                           std::uint64_t seed);
PrecodingMatrix precode_ace(const ChannelMatrix& h, std::span<const int> counts,
                            const CeSearchParams& params,
                            const LinkBudget& link, std::uint64_t seed);

}  // namespace mmsched
