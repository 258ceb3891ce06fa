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
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmsched/common.hpp"
#include "mmsched/rng.hpp"

namespace mmsched {

// QoS profile of a traffic class. Sizes are bytes; rates are bits/s.
struct TrafficType {
  std::string name;
  double packet_bytes = 0.0;
  double mean_arrival_ms = 0.0;
  double latency_ms = 0.0;
  std::optional<double> gbr_bps;
  double error_rate = 0.0;

  bool has_gbr() const { return gbr_bps.has_value(); }
  void validate() const;
};

// The six 5QI-derived classes A-F (VoIP, video, gaming, VR/AR, video
// streaming, FTP).
const std::vector<TrafficType>& builtin_traffic_types();

enum class PacketStatus { kPending, kDelivered, kExpired };

struct Packet {
  std::uint64_t id = 0;
  double size_bytes = 0.0;
  Tti arrival_tti = 0;
  Tti deadline_tti = 0;  // last TTI in which the packet may still be served
  double bits_delivered = 0.0;
  std::vector<Tti> served_ttis;
  PacketStatus status = PacketStatus::kPending;

  double size_bits() const { return 8.0 * size_bytes; }
  double remaining_bits() const { return size_bits() - bits_delivered; }
};

struct RateHistory {
  double sum_bps = 0.0;   // sum of per-TTI rates
  Tti active_ttis = 0;

  double average_bps() const {
    return active_ttis > 0 ? sum_bps / static_cast<double>(active_ttis) : 0.0;
  }
};

// A UE's traffic session: its queue, delivery counters and rate history.
struct UeSession {
  UeId ue_id = 0;
  std::size_t type_index = 0;
  TrafficType type;
  Tti start_tti = 0;
  Tti end_tti = 0;           // arrivals stop after this TTI
  double tti_seconds = 1e-3;

  std::deque<Packet> queue;  // pending packets, earliest deadline first
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t expired = 0;
  RateHistory rate_history;

  double next_arrival = 0.0;  // continuous-time Poisson clock, in TTIs
  std::uint64_t next_packet_id = 0;

  bool backlogged() const { return !queue.empty(); }
  double queued_bytes() const;
  double remaining_bits() const;
  // Deadline of the head-of-line packet; requires a non-empty queue.
  Tti head_deadline() const;
  Tti earliest_arrival() const;
  // Packets whose outcome is settled (delivered or expired).
  std::uint64_t settled() const { return delivered + expired; }
};

UeSession make_session(UeId ue, std::size_t type_index, const TrafficType& type,
                       Tti start_tti, Tti end_tti, double tti_seconds,
                       Rng& rng);

// Appends the packets of a Poisson arrival process that fall in [tti, tti+1).
// Returns the number of new packets.
std::size_t generate_arrivals(UeSession& session, Tti tti, Rng& rng);

// Credits phi * T_I bits to queued packets in deadline order, marks complete
// packets delivered and records phi in the rate history. Finished packets are
// appended to \p finished when given.
void deliver(UeSession& session, double phi_bps, Tti tti,
             std::vector<Packet>* finished = nullptr);

// Drops pending packets whose deadline is before \p tti.
std::size_t expire(UeSession& session, Tti tti,
                   std::vector<Packet>* finished = nullptr);

struct SessionUtility {
  int value = 0;
  bool vacuous = false;  // nothing generated; requirements hold trivially
  double loss_ratio = 0.0;
  double average_rate_bps = 0.0;
};

// 1 iff the loss ratio over settled packets is within the error-rate bound
// and, for GBR classes, the average rate over the session's active TTIs meets
// the GBR. Packets still in flight when the horizon cuts a session off are
// left out of the loss ratio.
SessionUtility utility(const UeSession& session);

// Number of TTIs spanned by a latency budget.
Tti latency_ttis(const TrafficType& type, double tti_seconds);

}  // namespace mmsched
