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

#include "mmsched/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace mmsched {

void EnvConfig::validate() const {
  if (antennas == 0) throw ConfigError("antennas must be positive");
  if (total_ues == 0) throw ConfigError("total_ues must be positive");
  if (!(avg_concurrent_ues > 0.0)) {
    throw ConfigError("avg_concurrent_ues must be positive");
  }
  if (horizon_ttis <= 0) throw ConfigError("horizon_ttis must be positive");
  if (!(tti_seconds > 0.0)) throw ConfigError("tti_seconds must be positive");
  if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth_hz must be positive");
  if (tx_power_watts && !(*tx_power_watts >= 0.0)) {
    throw ConfigError("tx_power_watts must be non-negative");
  }
  if (!(cell_radius_m > 0.0)) throw ConfigError("cell_radius_m must be positive");
  if (!(channel.fading_correlation >= 0.0 && channel.fading_correlation < 1.0)) {
    throw ConfigError("fading_correlation must lie in [0, 1)");
  }
  search.validate();
  if (state.slots == 0) throw ConfigError("state slots must be positive");
  if (traffic_types.empty()) throw ConfigError("no traffic types");
  for (const auto& t : traffic_types) t.validate();
  if (type_ratios.size() != traffic_types.size()) {
    throw ConfigError("type_ratios must have one entry per traffic type");
  }
  double total = 0.0;
  for (double r : type_ratios) {
    if (!(r >= 0.0)) throw ConfigError("type ratios must be non-negative");
    total += r;
  }
  if (!(total > 0.0)) throw ConfigError("type ratios sum to zero");
  if (short_term_window <= 0) {
    throw ConfigError("short_term_window must be positive");
  }
}

double EnvConfig::rho_watts() const {
  return tx_power_watts ? *tx_power_watts : dbm_to_watts(tx_power_dbm);
}

double EnvConfig::noise_watts() const {
  return thermal_noise_watts(bandwidth_hz, channel.noise_figure_db);
}

LinkBudget EnvConfig::link_budget() const {
  return LinkBudget{rho_watts(), noise_watts(), bandwidth_hz};
}

double EnvConfig::mean_holding_ttis() const {
  return avg_concurrent_ues * static_cast<double>(horizon_ttis) /
         static_cast<double>(total_ues);
}

std::vector<SessionSpec> generate_sessions(const EnvConfig& config,
                                           std::uint64_t seed) {
  Rng rng = make_rng({seed, static_cast<std::uint64_t>(Stream::kSessions)});
  const std::size_t k = config.total_ues;
  std::uniform_real_distribution<double> start_dist(
      0.0, static_cast<double>(config.horizon_ttis));
  std::exponential_distribution<double> hold_dist(1.0 /
                                                  config.mean_holding_ttis());

  std::vector<double> starts(k);
  std::vector<double> holds(k);
  for (std::size_t i = 0; i < k; ++i) {
    starts[i] = start_dist(rng);
    holds[i] = hold_dist(rng);
  }
  std::sort(starts.begin(), starts.end());

  const std::vector<int> per_type = apportion_counts(config.type_ratios, k);
  std::vector<std::size_t> types;
  for (std::size_t t = 0; t < per_type.size(); ++t) {
    types.insert(types.end(), static_cast<std::size_t>(per_type[t]), t);
  }
  std::shuffle(types.begin(), types.end(), rng);

  std::vector<SessionSpec> specs(k);
  for (std::size_t i = 0; i < k; ++i) {
    const Tti start = static_cast<Tti>(std::floor(starts[i]));
    const Tti hold = std::max<Tti>(1, static_cast<Tti>(std::llround(holds[i])));
    specs[i] = SessionSpec{static_cast<UeId>(i), types[i], start,
                           start + hold - 1};
  }
  return specs;
}

std::vector<int> apportion_counts(std::span<const double> ratios,
                                  std::size_t total) {
  const double sum = std::accumulate(ratios.begin(), ratios.end(), 0.0);
  std::vector<int> counts(ratios.size(), 0);
  std::vector<double> remainder(ratios.size(), 0.0);
  std::size_t given = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double quota = static_cast<double>(total) * ratios[i] / sum;
    counts[i] = static_cast<int>(std::floor(quota));
    remainder[i] = quota - counts[i];
    given += static_cast<std::size_t>(counts[i]);
  }
  std::vector<std::size_t> idx(ratios.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t i = 0; given < total; ++i, ++given) {
    ++counts[idx[i % idx.size()]];
  }
  return counts;
}

double ue_reward(const UeSession& session, const RewardParams& params) {
  if (session.generated == 0) return 0.0;
  const double ratio = static_cast<double>(session.delivered) /
                       static_cast<double>(session.generated);
  double pace = 0.0;
  const double alpha = session.type.has_gbr() ? params.alpha : 0.0;
  if (alpha != 0.0) {
    const auto& h = session.rate_history;
    pace = h.active_ttis > 0
               ? 1.0 - h.sum_bps / (static_cast<double>(h.active_ttis) *
                                    *session.type.gbr_bps)
               : 1.0;
    if (params.clamp_pace) pace = std::max(pace, 0.0);
  }
  return (ratio - 1.0) * (1.0 + alpha * pace);
}

Environment::Environment(EnvConfig config, std::uint64_t seed)
    : config_(std::move(config)), seed_(seed) {
  config_.validate();
  specs_ = generate_sessions(config_, seed_);
  reset();
}

Environment::Environment(EnvConfig config, std::uint64_t seed,
                         std::vector<SessionSpec> sessions)
    : config_(std::move(config)), seed_(seed), specs_(std::move(sessions)) {
  config_.validate();
  std::stable_sort(specs_.begin(), specs_.end(),
                   [](const SessionSpec& a, const SessionSpec& b) {
                     return a.start_tti < b.start_tti;
                   });
  for (const auto& s : specs_) {
    if (s.type_index >= config_.traffic_types.size()) {
      throw ConfigError("session references an unknown traffic type");
    }
    if (s.end_tti < s.start_tti) throw ConfigError("session ends before start");
  }
  reset();
}

std::size_t Environment::state_dim() const {
  return config_.state.slots * (4 + config_.traffic_types.size()) + 2;
}

StateVector Environment::reset() {
  UeId max_id = 0;
  for (const auto& s : specs_) max_id = std::max(max_id, s.ue);
  const std::size_t ids = specs_.empty() ? 0 : max_id + 1;
  topology_ = generate_topology(seed_, config_.cell_radius_m, ids);
  channel_model_.emplace(topology_, config_.channel, config_.antennas, seed_);
  sessions_.clear();
  sessions_.resize(ids);
  arrival_rng_.assign(ids, Rng());
  active_.clear();
  next_spec_ = 0;
  pf_ = PfHistory();
  tti_ = 0;
  done_ = false;
  outcomes_.clear();
  pending_expirations_ = 0;
  rate_sum_ = 0.0;
  reward_sum_ = 0.0;
  action_counts_.clear();
  begin_tti();
  return observe();
}

void Environment::finalize(UeSession& session, Tti end_tti) {
  outcomes_.push_back(
      SessionOutcome{session.ue_id, session.type_index, end_tti,
                     utility(session)});
  channel_model_->release(session.ue_id);
  pf_.erase(session.ue_id);
}

void Environment::begin_tti() {
  const Tti t = tti_;
  for (UeId ue : active_) {
    pending_expirations_ += expire(sessions_[ue], t);
  }
  std::vector<UeId> still;
  still.reserve(active_.size());
  for (UeId ue : active_) {
    UeSession& s = sessions_[ue];
    if (t > s.end_tti && !s.backlogged()) {
      finalize(s, t);
    } else {
      still.push_back(ue);
    }
  }
  active_ = std::move(still);

  while (next_spec_ < specs_.size() && specs_[next_spec_].start_tti <= t) {
    const SessionSpec& spec = specs_[next_spec_++];
    arrival_rng_[spec.ue] =
        make_rng({seed_, static_cast<std::uint64_t>(Stream::kArrivals), spec.ue});
    sessions_[spec.ue] = make_session(
        spec.ue, spec.type_index, config_.traffic_types[spec.type_index],
        spec.start_tti, spec.end_tti, config_.tti_seconds,
        arrival_rng_[spec.ue]);
    active_.insert(std::upper_bound(active_.begin(), active_.end(), spec.ue),
                   spec.ue);
  }

  for (UeId ue : active_) {
    UeSession& s = sessions_[ue];
    if (t <= s.end_tti) generate_arrivals(s, t, arrival_rng_[ue]);
  }

  ctx_ = SchedulingContext{};
  ctx_.tti = t;
  ctx_.antennas = static_cast<int>(config_.antennas);
  ctx_.tti_seconds = config_.tti_seconds;
  ctx_.budget = config_.link_budget();
  ctx_.pf = &pf_;
  ctx_.params = config_.scheduler;
  if (active_.empty()) {
    channel_ = ChannelMatrix{};
    channel_.tti = t;
    return;
  }
  channel_ = channel_model_->realize(active_, t);
  const double m = static_cast<double>(config_.antennas);
  for (std::size_t r = 0; r < active_.size(); ++r) {
    const UeId ue = active_[r];
    const double gain = channel_.entries.row(static_cast<Eigen::Index>(r))
                            .squaredNorm();
    const double snr = ctx_.budget.rho * gain / (m * ctx_.budget.sigma2);
    ctx_.sessions.push_back(&sessions_[ue]);
    ctx_.link.ue_ids.push_back(ue);
    ctx_.link.sinr.push_back(snr);
    ctx_.link.cqi.push_back(cqi_map(to_db(snr)));
    ctx_.channel_gains[ue] = gain;
  }
}

StateVector Environment::observe() const {
  const std::size_t types = config_.traffic_types.size();
  const std::size_t width = 4 + types;
  const auto& sp = config_.state;
  StateVector s = StateVector::Zero(static_cast<Eigen::Index>(state_dim()));
  const std::size_t n = std::min(sp.slots, active_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const UeSession& u = sessions_[active_[i]];
    const Eigen::Index base = static_cast<Eigen::Index>(i * width);
    s[base] = ctx_.link.cqi[i] / 15.0;
    s[base + 1] = std::log1p(u.queued_bytes()) / std::log1p(sp.backlog_scale_bytes);
    double margin = 1.0;
    if (u.backlogged()) {
      margin = std::clamp(static_cast<double>(u.head_deadline() - tti_),
                          0.0, sp.deadline_clip_ttis) /
               sp.deadline_clip_ttis;
    }
    s[base + 2] = margin;
    s[base + 3 + static_cast<Eigen::Index>(u.type_index)] = 1.0;
    double deficit = 0.0;
    if (u.type.has_gbr()) {
      deficit = std::clamp(
          1.0 - u.rate_history.average_bps() / *u.type.gbr_bps, -1.0, 1.0);
    }
    s[base + 3 + static_cast<Eigen::Index>(types)] = deficit;
  }
  const Eigen::Index tail = static_cast<Eigen::Index>(sp.slots * width);
  s[tail] = std::min(static_cast<double>(active_.size()) /
                         std::max(config_.avg_concurrent_ues, 1.0),
                     4.0) / 4.0;
  s[tail + 1] = static_cast<double>(config_.antennas) / sp.antenna_scale;
  return s;
}

SchedulePlan Environment::plan(const ActionTriple& action) const {
  SchedulePlan p;
  p.order = prioritize(action.priority(), ctx_);
  p.allocation = allocate(action.allocation(), p.order, ctx_);
  p.precoder = action.precoder();
  return p;
}

StepOutcome Environment::step(const ActionTriple& action) {
  return execute(plan(action), action_name(action));
}

StepOutcome Environment::execute(const SchedulePlan& plan,
                                 const std::string& label) {
  if (done_) throw std::logic_error("step after the episode ended");
  const auto& alloc = plan.allocation;
  if (alloc.ues.size() != alloc.counts.size()) {
    throw StructuralError("allocation sizes disagree");
  }
  if (alloc.total() > static_cast<int>(config_.antennas)) {
    throw StructuralError("allocation exceeds the antenna budget");
  }
  for (std::size_t i = 0; i < alloc.size(); ++i) {
    const UeId ue = alloc.ues[i];
    if (!std::binary_search(active_.begin(), active_.end(), ue) ||
        !sessions_[ue].backlogged()) {
      throw StructuralError("allocation names a UE without backlog");
    }
    if (alloc.counts[i] < 1) throw StructuralError("non-positive antenna count");
  }

  StepOutcome out;
  const LinkBudget& link = ctx_.budget;
  std::map<UeId, double> phi;
  if (!alloc.empty()) {
    const ChannelMatrix h = channel_.select(alloc.ues);
    const std::uint64_t search_seed =
        mix_seed({seed_, static_cast<std::uint64_t>(Stream::kSearch),
                  static_cast<std::uint64_t>(tti_)});
    PrecodingMatrix p;
    switch (plan.precoder) {
      case PrecoderKind::kAs:
        p = precode_as(h, alloc.counts);
        break;
      case PrecoderKind::kCe:
        p = precode_ce(h, alloc.counts, config_.search, link, search_seed);
        break;
      case PrecoderKind::kAce:
        p = precode_ace(h, alloc.counts, config_.search, link, search_seed);
        break;
      case PrecoderKind::kMmseAs: {
        const double lambda =
            link.rho > 0.0 ? static_cast<double>(alloc.size()) * link.sigma2 /
                                 link.rho
                           : 1.0;
        p = hybrid_precoder(h, greedy_assignment(h.entries, alloc.counts),
                            DigitalKind::kMmse, lambda);
        break;
      }
    }
    out.max_antenna_gain = max_antenna_gain(p.entries);
    if (out.max_antenna_gain > 1.0 + 1e-9) {
      throw StructuralError("precoder violates the per-antenna gain bound");
    }
    const std::vector<double> s = sinr(h.entries, p.entries, link.rho,
                                       link.sigma2);
    for (std::size_t i = 0; i < alloc.size(); ++i) {
      const double r = rate(s[i], link.bandwidth_hz);
      phi[alloc.ues[i]] = r;
      out.rates.emplace_back(alloc.ues[i], r);
      out.sum_rate += r;
    }
  }
  out.scheduled = alloc.size();
  out.antennas_used = alloc.total();

  for (UeId ue : active_) {
    auto it = phi.find(ue);
    const double r = it == phi.end() ? 0.0 : it->second;
    deliver(sessions_[ue], r, tti_);
    pf_.update(ue, r, config_.scheduler.pf_beta);
  }
  for (UeId ue : active_) {
    const double r = ue_reward(sessions_[ue], config_.reward);
    out.ue_rewards.emplace_back(ue, r);
    out.reward += r;
  }
  rate_sum_ += out.sum_rate;
  reward_sum_ += out.reward;
  ++action_counts_[label];

  if (trace_ != nullptr) {
    nlohmann::json line;
    line["tti"] = tti_;
    line["action"] = label;
    line["active"] = active_.size();
    nlohmann::json sched = nlohmann::json::array();
    for (std::size_t i = 0; i < alloc.size(); ++i) {
      sched.push_back({{"ue", alloc.ues[i]},
                       {"antennas", alloc.counts[i]},
                       {"rate_bps", phi[alloc.ues[i]]}});
    }
    line["scheduled"] = std::move(sched);
    line["reward"] = out.reward;
    *trace_ << line.dump() << '\n';
  }

  ++tti_;
  pending_expirations_ = 0;
  if (tti_ >= config_.horizon_ttis) {
    for (UeId ue : active_) finalize(sessions_[ue], tti_);
    active_.clear();
    done_ = true;
    ctx_.sessions.clear();
    ctx_.link = LinkQuality{};
    ctx_.channel_gains.clear();
  } else {
    begin_tti();
  }
  out.expirations = pending_expirations_;
  out.done = done_;
  out.next_state = observe();
  return out;
}

EpisodeMetrics Environment::metrics() const {
  EpisodeMetrics m;
  m.sessions = outcomes_.size();
  double total = 0.0;
  for (const auto& o : outcomes_) {
    total += o.utility.value;
    if (o.utility.vacuous) ++m.vacuous_sessions;
  }
  m.normalized_utility =
      outcomes_.empty() ? 0.0 : total / static_cast<double>(outcomes_.size());
  m.ttis = tti_;
  m.throughput_bps = tti_ > 0 ? rate_sum_ / static_cast<double>(tti_) : 0.0;
  m.short_term_utilities =
      short_term_utilities(outcomes_, config_.short_term_window);
  m.action_counts = action_counts_;
  m.total_reward = reward_sum_;
  return m;
}

std::vector<double> short_term_utilities(std::span<const SessionOutcome> outcomes,
                                         Tti window) {
  std::map<Tti, std::pair<double, std::size_t>> bins;
  for (const auto& o : outcomes) {
    auto& b = bins[o.end_tti / window];
    b.first += o.utility.value;
    ++b.second;
  }
  std::vector<double> out;
  out.reserve(bins.size());
  for (const auto& [_, b] : bins) {
    out.push_back(b.first / static_cast<double>(b.second));
  }
  return out;
}

SchedulePlan StaticPolicy::decide(const Environment& env, const StateVector&,
                                  std::string& label) {
  label = action_name(action_);
  return env.plan(action_);
}

std::string BaselinePolicy::name() const {
  switch (kind_) {
    case BaselineKind::kOrfa:
      return "orfa";
    case BaselineKind::kUblaa:
      return "ublaa";
    case BaselineKind::kLwdfPf:
      return "lwdf-pf";
  }
  return "";
}

SchedulePlan BaselinePolicy::decide(const Environment& env, const StateVector&,
                                    std::string& label) {
  label = name();
  switch (kind_) {
    case BaselineKind::kOrfa:
      return baseline_orfa(env.context());
    case BaselineKind::kUblaa:
      return baseline_ublaa(env.context());
    case BaselineKind::kLwdfPf:
      return baseline_lwdf_pf(env.context());
  }
  return {};
}

std::optional<BaselineKind> parse_baseline(std::string_view name) {
  if (name == "orfa") return BaselineKind::kOrfa;
  if (name == "ublaa") return BaselineKind::kUblaa;
  if (name == "lwdf-pf") return BaselineKind::kLwdfPf;
  return std::nullopt;
}

std::vector<std::string> baseline_names() {
  return {"orfa", "ublaa", "lwdf-pf"};
}

EpisodeMetrics run_episode(Environment& env, Policy& policy) {
  StateVector state = env.reset();
  std::string label;
  while (!env.done()) {
    const SchedulePlan p = policy.decide(env, state, label);
    state = env.execute(p, label).next_state;
  }
  return env.metrics();
}

}  // namespace mmsched
