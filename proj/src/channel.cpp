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

#include "mmsched/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mmsched/rng.hpp"

namespace mmsched {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
constexpr double kThermalDensityDbmPerHz = -174.0;
}  // namespace

double Topology::distance(UeId ue) const {
  const Point& p = ue_positions.at(ue);
  return std::hypot(p.x, p.y);
}

ChannelMatrix ChannelMatrix::select(std::span<const UeId> ues) const {
  ChannelMatrix out;
  out.tti = tti;
  out.entries.resize(static_cast<Eigen::Index>(ues.size()), entries.cols());
  out.ue_index_map.assign(ues.begin(), ues.end());
  for (std::size_t r = 0; r < ues.size(); ++r) {
    auto it = std::find(ue_index_map.begin(), ue_index_map.end(), ues[r]);
    if (it == ue_index_map.end()) {
      throw StructuralError("channel has no row for UE " +
                            std::to_string(ues[r]));
    }
    out.entries.row(static_cast<Eigen::Index>(r)) =
        entries.row(it - ue_index_map.begin());
  }
  return out;
}

int LinkQuality::cqi_of(UeId ue) const {
  auto it = std::find(ue_ids.begin(), ue_ids.end(), ue);
  return it == ue_ids.end() ? 0 : cqi[static_cast<std::size_t>(it - ue_ids.begin())];
}

double LinkQuality::sinr_of(UeId ue) const {
  auto it = std::find(ue_ids.begin(), ue_ids.end(), ue);
  return it == ue_ids.end() ? 0.0
                            : sinr[static_cast<std::size_t>(it - ue_ids.begin())];
}

Topology generate_topology(std::uint64_t seed, double radius,
                           std::size_t k_total) {
  Topology topo;
  topo.cell_radius = radius;
  topo.ue_positions.reserve(k_total);
  Rng rng = make_rng({seed, static_cast<std::uint64_t>(Stream::kTopology)});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < k_total; ++k) {
    // sqrt of a uniform radius fraction gives uniform density over the disk.
    const double r = radius * std::sqrt(unit(rng));
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    topo.ue_positions.push_back({r * std::cos(theta), r * std::sin(theta)});
  }
  return topo;
}

double free_space_loss_1m_db(double carrier_hz) {
  return 20.0 * std::log10(4.0 * std::numbers::pi * carrier_hz / kSpeedOfLight);
}

double pathloss_db(const ChannelParams& params, double distance_m) {
  const double d = std::max(distance_m, params.min_distance_m);
  return free_space_loss_1m_db(params.carrier_hz) +
         10.0 * params.pathloss_exponent * std::log10(d) + params.extra_loss_db;
}

double pathloss_gain(const ChannelParams& params, double distance_m) {
  return std::pow(10.0, -pathloss_db(params, distance_m) / 10.0);
}

double thermal_noise_watts(double bandwidth_hz, double noise_figure_db) {
  const double dbm = kThermalDensityDbmPerHz + 10.0 * std::log10(bandwidth_hz) +
                     noise_figure_db;
  return dbm_to_watts(dbm);
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double to_db(double linear) { return 10.0 * std::log10(linear); }

ChannelModel::ChannelModel(const Topology& topology, ChannelParams params,
                           std::size_t antennas, std::uint64_t seed)
    : params_(params), antennas_(antennas), seed_(seed) {
  if (params_.fading_correlation < 0.0 || params_.fading_correlation >= 1.0) {
    throw ConfigError("fading_correlation must lie in [0, 1)");
  }
  amplitude_.reserve(topology.size());
  for (UeId ue = 0; ue < topology.size(); ++ue) {
    amplitude_.push_back(std::sqrt(pathloss_gain(params_, topology.distance(ue))));
  }
}

CVector ChannelModel::innovation(UeId ue, Tti tti) const {
  SplitMix gen(mix_seed({seed_, static_cast<std::uint64_t>(Stream::kFading),
                         ue, static_cast<std::uint64_t>(tti)}));
  CVector w(static_cast<Eigen::Index>(antennas_));
  // CN(0, 1): real and imaginary parts each carry variance 1/2.
  for (Eigen::Index m = 0; m < w.size(); ++m) {
    auto [re, im] = gen.normal_pair();
    w[m] = Complex(re, im) * (1.0 / std::numbers::sqrt2);
  }
  return w;
}

ChannelMatrix ChannelModel::realize(std::span<const UeId> active_ues, Tti tti) {
  ChannelMatrix h;
  h.tti = tti;
  h.ue_index_map.assign(active_ues.begin(), active_ues.end());
  h.entries.resize(static_cast<Eigen::Index>(active_ues.size()),
                   static_cast<Eigen::Index>(antennas_));
  const double rho = params_.fading_correlation;
  const double drive = std::sqrt(1.0 - rho * rho);
  for (std::size_t r = 0; r < active_ues.size(); ++r) {
    const UeId ue = active_ues[r];
    if (ue >= amplitude_.size()) {
      throw ConfigError("unknown UE id " + std::to_string(ue));
    }
    auto it = fading_.find(ue);
    if (it == fading_.end()) {
      it = fading_.emplace(ue, FadingState{innovation(ue, tti), tti}).first;
    }
    FadingState& state = it->second;
    if (tti < state.tti) {
      throw StructuralError("channel realized backwards in time");
    }
    while (state.tti < tti) {
      ++state.tti;
      state.gain = rho * state.gain + drive * innovation(ue, state.tti);
    }
    h.entries.row(static_cast<Eigen::Index>(r)) =
        amplitude_[ue] * state.gain.transpose();
  }
  return h;
}

ChannelMatrix realize_channel(const Topology& topology,
                              std::span<const UeId> active_ues, Tti tti,
                              std::uint64_t seed, const ChannelParams& params,
                              std::size_t antennas) {
  if (active_ues.empty()) {
    throw StructuralError("realize_channel needs at least one UE");
  }
  ChannelModel model(topology, params, antennas, seed);
  return model.realize(active_ues, tti);
}

std::vector<double> sinr(const CMatrix& h, const CMatrix& p, double rho,
                         double sigma2) {
  if (h.cols() != p.rows() || h.rows() != p.cols()) {
    throw StructuralError("sinr: H is " + std::to_string(h.rows()) + "x" +
                          std::to_string(h.cols()) + " but P is " +
                          std::to_string(p.rows()) + "x" +
                          std::to_string(p.cols()));
  }
  const Eigen::Index users = p.cols();
  std::vector<double> out(static_cast<std::size_t>(users), 0.0);
  if (users == 0) return out;
  const CMatrix g = h * p;
  const double share = rho / static_cast<double>(users);
  for (Eigen::Index k = 0; k < users; ++k) {
    const double signal = std::norm(g(k, k));
    double interference = 0.0;
    for (Eigen::Index j = 0; j < users; ++j) {
      if (j != k) interference += std::norm(g(k, j));
    }
    const double denom = sigma2 + share * interference;
    out[static_cast<std::size_t>(k)] =
        denom > 0.0 ? share * signal / denom : 0.0;
  }
  return out;
}

double rate(double sinr_linear, double bandwidth_hz) {
  if (!(sinr_linear >= 0.0)) {
    throw StructuralError("rate: SINR must be non-negative");
  }
  return bandwidth_hz * std::log2(1.0 + sinr_linear);
}

int cqi_map(double sinr_db) {
  if (!(sinr_db >= -6.0)) return 0;
  const int level = static_cast<int>(std::floor((sinr_db + 6.0) / 2.0)) + 1;
  return std::min(level, 15);
}

}  // namespace mmsched
