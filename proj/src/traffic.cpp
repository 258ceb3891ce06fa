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

#include "mmsched/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmsched {

void TrafficType::validate() const {
  if (!(packet_bytes > 0.0)) throw ConfigError(name + ": packet size must be > 0");
  if (!(latency_ms > 0.0)) throw ConfigError(name + ": latency must be > 0");
  if (!(mean_arrival_ms > 0.0)) {
    throw ConfigError(name + ": mean arrival time must be > 0");
  }
  if (!(error_rate >= 0.0 && error_rate < 1.0)) {
    throw ConfigError(name + ": error rate must lie in [0, 1)");
  }
  if (gbr_bps && !(*gbr_bps > 0.0)) throw ConfigError(name + ": GBR must be > 0");
}

const std::vector<TrafficType>& builtin_traffic_types() {
  static const std::vector<TrafficType> types = {
      {"A", 200.0, 15.0, 100.0, 0.112e6, 1e-2},
      {"B", 1250.0, 5.0, 150.0, 0.8e6, 1e-3},
      {"C", 500.0, 8.0, 50.0, 0.72e6, 1e-3},
      {"D", 1250.0, 2.0, 10.0, std::nullopt, 1e-6},
      {"E", 1250.0, 10.0, 100.0, std::nullopt, 1e-3},
      {"F", 1250.0, 6.0, 300.0, std::nullopt, 1e-2},
  };
  return types;
}

Tti latency_ttis(const TrafficType& type, double tti_seconds) {
  return static_cast<Tti>(std::llround(type.latency_ms * 1e-3 / tti_seconds));
}

double UeSession::queued_bytes() const {
  return remaining_bits() / 8.0;
}

double UeSession::remaining_bits() const {
  double bits = 0.0;
  for (const Packet& p : queue) bits += p.remaining_bits();
  return bits;
}

Tti UeSession::head_deadline() const {
  if (queue.empty()) throw StructuralError("head_deadline on an empty queue");
  return queue.front().deadline_tti;
}

Tti UeSession::earliest_arrival() const {
  if (queue.empty()) throw StructuralError("earliest_arrival on an empty queue");
  Tti first = queue.front().arrival_tti;
  for (const Packet& p : queue) first = std::min(first, p.arrival_tti);
  return first;
}

namespace {

double draw_gap(const TrafficType& type, double tti_seconds, Rng& rng) {
  const double mean_ttis = type.mean_arrival_ms * 1e-3 / tti_seconds;
  if (!std::isfinite(mean_ttis)) return std::numeric_limits<double>::infinity();
  return std::exponential_distribution<double>(1.0 / mean_ttis)(rng);
}

}  // namespace

UeSession make_session(UeId ue, std::size_t type_index, const TrafficType& type,
                       Tti start_tti, Tti end_tti, double tti_seconds,
                       Rng& rng) {
  UeSession s;
  s.ue_id = ue;
  s.type_index = type_index;
  s.type = type;
  s.start_tti = start_tti;
  s.end_tti = end_tti;
  s.tti_seconds = tti_seconds;
  s.next_arrival = static_cast<double>(start_tti) + draw_gap(type, tti_seconds, rng);
  return s;
}

std::size_t generate_arrivals(UeSession& session, Tti tti, Rng& rng) {
  std::size_t count = 0;
  const Tti window = latency_ttis(session.type, session.tti_seconds);
  while (session.next_arrival < static_cast<double>(tti + 1)) {
    if (session.next_arrival >= static_cast<double>(tti)) {
      Packet p;
      p.id = session.next_packet_id++;
      p.size_bytes = session.type.packet_bytes;
      p.arrival_tti = tti;
      p.deadline_tti = tti + window;
      session.queue.push_back(std::move(p));
      ++session.generated;
      ++count;
    }
    session.next_arrival += draw_gap(session.type, session.tti_seconds, rng);
  }
  // A single class shares one latency budget, so arrival order is deadline
  // order and the queue stays sorted without re-sorting.
  return count;
}

void deliver(UeSession& session, double phi_bps, Tti tti,
             std::vector<Packet>* finished) {
  if (!(phi_bps >= 0.0)) throw StructuralError("deliver: negative rate");
  session.rate_history.sum_bps += phi_bps;
  ++session.rate_history.active_ttis;
  double budget = phi_bps * session.tti_seconds;
  while (budget > 0.0 && !session.queue.empty()) {
    Packet& head = session.queue.front();
    if (head.arrival_tti > tti || head.deadline_tti < tti) break;
    const double credit = std::min(budget, head.remaining_bits());
    head.bits_delivered += credit;
    head.served_ttis.push_back(tti);
    budget -= credit;
    if (head.remaining_bits() <= 0.0) {
      head.bits_delivered = head.size_bits();
      head.status = PacketStatus::kDelivered;
      ++session.delivered;
      if (finished) finished->push_back(std::move(head));
      session.queue.pop_front();
    }
  }
}

std::size_t expire(UeSession& session, Tti tti, std::vector<Packet>* finished) {
  std::size_t count = 0;
  while (!session.queue.empty() && session.queue.front().deadline_tti < tti) {
    Packet& head = session.queue.front();
    head.status = PacketStatus::kExpired;
    ++session.expired;
    ++count;
    if (finished) finished->push_back(std::move(head));
    session.queue.pop_front();
  }
  return count;
}

SessionUtility utility(const UeSession& session) {
  SessionUtility u;
  u.average_rate_bps = session.rate_history.average_bps();
  if (session.generated == 0) {
    u.value = 1;
    u.vacuous = true;
    return u;
  }
  const std::uint64_t settled = session.settled();
  const double lost = static_cast<double>(settled - session.delivered);
  u.loss_ratio = settled > 0 ? lost / static_cast<double>(settled) : 0.0;
  const double allowed = session.type.error_rate * static_cast<double>(settled);
  const bool loss_ok = lost <= allowed * (1.0 + 1e-12);
  const bool gbr_ok =
      !session.type.has_gbr() || u.average_rate_bps >= *session.type.gbr_bps;
  u.value = loss_ok && gbr_ok ? 1 : 0;
  return u;
}

}  // namespace mmsched
