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

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mmsched/channel.hpp"
#include "mmsched/common.hpp"
#include "mmsched/precoding.hpp"
#include "mmsched/traffic.hpp"

namespace mmsched {

// Component 1: UE prioritization.
enum class PriorityMethod { kCqi, kDelay, kRemain, kFifo };

// Component 2: antenna allocation family; MinG and PF carry a ratio iota.
enum class AllocFamily { kFso, kMinG, kPf };

struct AllocMethod {
  AllocFamily family = AllocFamily::kFso;
  double iota = 1.0;
  friend bool operator==(const AllocMethod&, const AllocMethod&) = default;
};

// Component 3 plus the MMSE stage only the ORFA baseline uses.
enum class PrecoderKind { kAs, kCe, kAce, kMmseAs };

using OrderedUeSet = std::vector<UeId>;

// Antenna counts for scheduled UEs, kept in O_t order. Every count is >= 1.
struct AntennaAllocation {
  std::vector<UeId> ues;
  std::vector<int> counts;

  void grant(UeId ue, int n);
  int total() const;
  int count_of(UeId ue) const;
  std::size_t size() const { return ues.size(); }
  bool empty() const { return ues.empty(); }
};

using SessionView = std::span<const UeSession* const>;

// Rate estimate (bits/s) for a UE served by n antennas, used before the
// precoder runs.
using RateEstimate = std::function<double(UeId, int)>;

struct SchedulerParams {
  double pf_beta = 0.05;
  double pf_history_floor_bps = 1e3;
  double lwdf_top_fraction = 0.5;
};

// Moving-average throughput per UE for proportional fairness.
class PfHistory {
 public:
  double get(UeId ue) const;
  void update(UeId ue, double phi_bps, double beta);
  void erase(UeId ue) { average_.erase(ue); }

 private:
  std::map<UeId, double> average_;
};

// Interference-free beamforming-gain proxy
//   W log2(1 + rho n ||h_k||^2 / (M sigma2 |O_t|)).
RateEstimate beamforming_estimator(const LinkBudget& link, int antennas,
                                   int ordered_users,
                                   std::map<UeId, double> channel_gains);

// Orders backlogged sessions by the method's key; ties go to the lower id.
OrderedUeSet prioritize(PriorityMethod method, SessionView sessions,
                        const LinkQuality& link, Tti tti);

struct FullSatisfy {
  int antennas = 0;
  bool saturated = false;  // even the whole array cannot clear the backlog
};

// Smallest n with estimate(n) * T_I >= remaining_bits, by binary search over
// [1, max_antennas].
FullSatisfy n_fullsatisfy(double remaining_bits,
                          const std::function<double(int)>& estimate,
                          double tti_seconds, int max_antennas);

// Walks O_t granting each UE min(N^fs, budget left) until the budget is gone.
AntennaAllocation allocate_fso(const OrderedUeSet& order, SessionView sessions,
                               int antennas, const RateEstimate& estimate,
                               double tti_seconds);

// The first floor(iota M / g) UEs (clamped to [1, |O_t|]) get g antennas
// each, where g is the smallest positive N^fs; FSO serves the rest.
AntennaAllocation allocate_ming(const OrderedUeSet& order, SessionView sessions,
                                int antennas, const RateEstimate& estimate,
                                double tti_seconds, double iota);

// Top ceil(iota |O_t|) UEs share the array in proportion to
// estimate / max(history, floor), by largest remainder with one antenna each
// guaranteed.
AntennaAllocation allocate_pf(const OrderedUeSet& order, int antennas,
                              const RateEstimate& estimate,
                              const PfHistory& history,
                              const SchedulerParams& params, double iota);

// Largest-remainder apportionment of total over weights with a floor of one
// per entry (requires total >= weights.size()). Ties go to the earlier entry.
std::vector<int> apportion(std::span<const double> weights, int total);

// Everything a scheduler may look at in one TTI.
struct SchedulingContext {
  Tti tti = 0;
  int antennas = 0;
  double tti_seconds = 1e-3;
  std::vector<const UeSession*> sessions;  // active sessions, ascending id
  LinkQuality link;
  LinkBudget budget;
  std::map<UeId, double> channel_gains;  // ||h_k||^2
  const PfHistory* pf = nullptr;
  SchedulerParams params;

  const UeSession& session(UeId ue) const;
  RateEstimate estimator(int ordered_users) const;
};

struct SchedulePlan {
  OrderedUeSet order;
  AntennaAllocation allocation;
  PrecoderKind precoder = PrecoderKind::kAs;
};

OrderedUeSet prioritize(PriorityMethod method, const SchedulingContext& ctx);
AntennaAllocation allocate(const AllocMethod& method, const OrderedUeSet& order,
                           const SchedulingContext& ctx);

// Simplified literature baselines. Each returns a complete plan.
// ORFA: PF ranking, discrete water-filling on marginal rate, MMSE precoding.
SchedulePlan baseline_orfa(const SchedulingContext& ctx);
// UBLAA: antenna-by-antenna grants to the highest marginal utility, AS.
SchedulePlan baseline_ublaa(const SchedulingContext& ctx);
// LWDF-PF: delay-weighted PF ranking, even split over the top UEs, ACE.
SchedulePlan baseline_lwdf_pf(const SchedulingContext& ctx);

}  // namespace mmsched
