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

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "mmsched/common.hpp"

namespace mmsched {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// UE placement in a single circular cell with the base station at the origin.
struct Topology {
  std::vector<Point> ue_positions;
  double cell_radius = 0.0;

  std::size_t size() const { return ue_positions.size(); }
  double distance(UeId ue) const;
};

// Large-scale and small-scale channel model parameters. The path loss is a
// log-distance law anchored at the free-space loss at 1 m for the carrier.
struct ChannelParams {
  double carrier_hz = 3.5e9;
  double pathloss_exponent = 3.5;
  double fading_correlation = 0.9;  // AR(1) coefficient across TTIs
  double noise_figure_db = 7.0;
  double extra_loss_db = 0.0;       // shadowing / penetration margin
  double min_distance_m = 1.0;
};

// K_r x M channel. Row r belongs to UE ue_index_map[r].
struct ChannelMatrix {
  CMatrix entries;
  Tti tti = 0;
  std::vector<UeId> ue_index_map;

  Eigen::Index rows() const { return entries.rows(); }
  Eigen::Index antennas() const { return entries.cols(); }
  // Channel restricted to the given UEs, in the given order.
  ChannelMatrix select(std::span<const UeId> ues) const;
};

// Per-UE link feedback: linear SINR and its CQI level.
struct LinkQuality {
  std::vector<UeId> ue_ids;
  std::vector<double> sinr;
  std::vector<int> cqi;

  int cqi_of(UeId ue) const;
  double sinr_of(UeId ue) const;
};

// Uniform placement over the disk (a Poisson point process conditioned on
// k_total points). Deterministic in seed.
Topology generate_topology(std::uint64_t seed, double radius,
                           std::size_t k_total);

double free_space_loss_1m_db(double carrier_hz);
double pathloss_db(const ChannelParams& params, double distance_m);
// Linear power gain, i.e. 10^(-PL/10).
double pathloss_gain(const ChannelParams& params, double distance_m);
double thermal_noise_watts(double bandwidth_hz, double noise_figure_db);
double dbm_to_watts(double dbm);

// Time-correlated Rayleigh fading over a topology. Each UE carries its own
// AR(1) state, started the first TTI the UE is realized. Innovations are
// keyed on (seed, ue, tti), so a realization is reproducible for a fixed
// seed and tti regardless of which other UEs were realized.
class ChannelModel {
 public:
  ChannelModel(const Topology& topology, ChannelParams params,
               std::size_t antennas, std::uint64_t seed);

  // Advances the fading state of each listed UE to \p tti and returns the
  // channel rows. TTIs must be non-decreasing per UE.
  ChannelMatrix realize(std::span<const UeId> active_ues, Tti tti);

  // Drops the fading state of a UE that has left the system.
  void release(UeId ue) { fading_.erase(ue); }

  const ChannelParams& params() const { return params_; }
  std::size_t antennas() const { return antennas_; }

 private:
  struct FadingState {
    CVector gain;
    Tti tti = 0;
  };

  CVector innovation(UeId ue, Tti tti) const;

  std::vector<double> amplitude_;  // sqrt of path-loss gain per UE
  ChannelParams params_;
  std::size_t antennas_;
  std::uint64_t seed_;
  std::map<UeId, FadingState> fading_;
};

// One-shot form of ChannelModel::realize for a fresh model.
ChannelMatrix realize_channel(const Topology& topology,
                              std::span<const UeId> active_ues, Tti tti,
                              std::uint64_t seed,
                              const ChannelParams& params,
                              std::size_t antennas);

// Per-UE SINR for rows of h served by the matching columns of p:
//   SINR_k = (rho/K)|h_k p_k|^2 / (sigma2 + (rho/K) sum_{j!=k} |h_k p_j|^2)
// with K = p.cols().
std::vector<double> sinr(const CMatrix& h, const CMatrix& p, double rho,
                         double sigma2);

// Achievable rate in bits/s, W log2(1 + sinr).
double rate(double sinr_linear, double bandwidth_hz);

// 16-level quantizer: level i >= 1 starts at -6 + 2(i-1) dB.
int cqi_map(double sinr_db);

double to_db(double linear);

}  // namespace mmsched
