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

#include "mmsched/scheduling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mmsched {

void AntennaAllocation::grant(UeId ue, int n) {
  if (n < 1) return;
  ues.push_back(ue);
  counts.push_back(n);
}

int AntennaAllocation::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0);
}

int AntennaAllocation::count_of(UeId ue) const {
  auto it = std::find(ues.begin(), ues.end(), ue);
  return it == ues.end() ? 0 : counts[static_cast<std::size_t>(it - ues.begin())];
}

double PfHistory::get(UeId ue) const {
  auto it = average_.find(ue);
  return it == average_.end() ? 0.0 : it->second;
}

void PfHistory::update(UeId ue, double phi_bps, double beta) {
  double& avg = average_[ue];
  avg = (1.0 - beta) * avg + beta * phi_bps;
}

RateEstimate beamforming_estimator(const LinkBudget& link, int antennas,
                                   int ordered_users,
                                   std::map<UeId, double> channel_gains) {
  const double users = std::max(ordered_users, 1);
  const double m = std::max(antennas, 1);
  return [link, m, users, gains = std::move(channel_gains)](UeId ue, int n) {
    auto it = gains.find(ue);
    const double g = it == gains.end() ? 0.0 : it->second;
    const double snr = link.rho * n * g / (m * link.sigma2 * users);
    return link.bandwidth_hz * std::log2(1.0 + snr);
  };
}

namespace {

const UeSession* find_session(SessionView sessions, UeId ue) {
  for (const UeSession* s : sessions) {
    if (s->ue_id == ue) return s;
  }
  return nullptr;
}

template <typename Key>
OrderedUeSet order_by(SessionView sessions, Key key) {
  std::vector<const UeSession*> backlog;
  for (const UeSession* s : sessions) {
    if (s->backlogged()) backlog.push_back(s);
  }
  std::sort(backlog.begin(), backlog.end(),
            [&](const UeSession* a, const UeSession* b) {
              const auto ka = key(*a);
              const auto kb = key(*b);
              if (ka != kb) return ka < kb;
              return a->ue_id < b->ue_id;
            });
  OrderedUeSet out;
  out.reserve(backlog.size());
  for (const UeSession* s : backlog) out.push_back(s->ue_id);
  return out;
}

FullSatisfy need_of(const UeSession& s, const RateEstimate& estimate,
                    double tti_seconds, int antennas) {
  return n_fullsatisfy(
      s.remaining_bits(), [&](int n) { return estimate(s.ue_id, n); },
      tti_seconds, antennas);
}

void fso_fill(AntennaAllocation& out, std::span<const UeId> order,
              SessionView sessions, int budget, const RateEstimate& estimate,
              double tti_seconds, int antennas) {
  for (UeId ue : order) {
    if (budget <= 0) break;
    const UeSession* s = find_session(sessions, ue);
    if (!s) continue;
    const int need = need_of(*s, estimate, tti_seconds, antennas).antennas;
    const int grant = std::min(need, budget);
    if (grant >= 1) {
      out.grant(ue, grant);
      budget -= grant;
    }
  }
}

int ratio_count(double iota, std::size_t n) {
  // Guard against 0.75 * 4 landing a hair above 3.
  return static_cast<int>(std::ceil(iota * static_cast<double>(n) - 1e-9));
}

}  // namespace

OrderedUeSet prioritize(PriorityMethod method, SessionView sessions,
                        const LinkQuality& link, Tti tti) {
  switch (method) {
    case PriorityMethod::kCqi:
      return order_by(sessions, [&](const UeSession& s) {
        return -static_cast<double>(link.cqi_of(s.ue_id));
      });
    case PriorityMethod::kDelay:
      return order_by(sessions, [&](const UeSession& s) {
        return static_cast<double>(s.head_deadline() - tti);
      });
    case PriorityMethod::kRemain:
      return order_by(sessions, [](const UeSession& s) {
        return -static_cast<double>(s.generated - s.delivered);
      });
    case PriorityMethod::kFifo:
      return order_by(sessions, [](const UeSession& s) {
        return static_cast<double>(s.earliest_arrival());
      });
  }
  return {};
}

FullSatisfy n_fullsatisfy(double remaining_bits,
                          const std::function<double(int)>& estimate,
                          double tti_seconds, int max_antennas) {
  if (remaining_bits <= 0.0 || max_antennas < 1) return {};
  auto enough = [&](int n) { return estimate(n) * tti_seconds >= remaining_bits; };
  if (!enough(max_antennas)) return {max_antennas, true};
  int lo = 1;
  int hi = max_antennas;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (enough(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return {lo, false};
}

AntennaAllocation allocate_fso(const OrderedUeSet& order, SessionView sessions,
                               int antennas, const RateEstimate& estimate,
                               double tti_seconds) {
  AntennaAllocation out;
  fso_fill(out, order, sessions, antennas, estimate, tti_seconds, antennas);
  return out;
}

AntennaAllocation allocate_ming(const OrderedUeSet& order, SessionView sessions,
                                int antennas, const RateEstimate& estimate,
                                double tti_seconds, double iota) {
  AntennaAllocation out;
  int g = 0;
  for (UeId ue : order) {
    const UeSession* s = find_session(sessions, ue);
    if (!s) continue;
    const int need = need_of(*s, estimate, tti_seconds, antennas).antennas;
    if (need > 0 && (g == 0 || need < g)) g = need;
  }
  if (g == 0) return out;
  const int guaranteed = std::clamp(
      static_cast<int>(std::floor(iota * antennas / g + 1e-9)), 1,
      static_cast<int>(order.size()));
  int budget = antennas;
  for (int i = 0; i < guaranteed && budget >= g; ++i) {
    out.grant(order[static_cast<std::size_t>(i)], g);
    budget -= g;
  }
  fso_fill(out, std::span(order).subspan(static_cast<std::size_t>(guaranteed)),
           sessions, budget, estimate, tti_seconds, antennas);
  return out;
}

std::vector<int> apportion(std::span<const double> weights, int total) {
  const auto n = static_cast<int>(weights.size());
  if (n == 0) return {};
  if (total < n) throw StructuralError("apportion: fewer units than entries");
  double sum = 0.0;
  bool usable = true;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) usable = false;
    sum += w;
  }
  std::vector<double> share(weights.begin(), weights.end());
  if (!usable || !(sum > 0.0)) {
    std::fill(share.begin(), share.end(), 1.0);
    sum = n;
  }
  const int spare = total - n;
  std::vector<int> out(static_cast<std::size_t>(n), 1);
  std::vector<double> frac(static_cast<std::size_t>(n));
  int assigned = 0;
  for (int i = 0; i < n; ++i) {
    const double quota = spare * share[static_cast<std::size_t>(i)] / sum;
    const int whole = static_cast<int>(std::floor(quota + 1e-12));
    out[static_cast<std::size_t>(i)] += whole;
    frac[static_cast<std::size_t>(i)] = quota - whole;
    assigned += whole;
  }
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return frac[static_cast<std::size_t>(a)] > frac[static_cast<std::size_t>(b)] + 1e-12;
  });
  for (int i = 0; assigned < spare; ++i, ++assigned) {
    ++out[static_cast<std::size_t>(idx[static_cast<std::size_t>(i % n)])];
  }
  return out;
}

AntennaAllocation allocate_pf(const OrderedUeSet& order, int antennas,
                              const RateEstimate& estimate,
                              const PfHistory& history,
                              const SchedulerParams& params, double iota) {
  AntennaAllocation out;
  if (order.empty() || antennas < 1) return out;
  const int n = std::clamp(ratio_count(iota, order.size()), 1,
                           std::min(static_cast<int>(order.size()), antennas));
  const int share = std::max(1, antennas / n);
  std::vector<double> weights;
  for (int i = 0; i < n; ++i) {
    const UeId ue = order[static_cast<std::size_t>(i)];
    weights.push_back(estimate(ue, share) /
                      std::max(history.get(ue), params.pf_history_floor_bps));
  }
  const std::vector<int> counts = apportion(weights, antennas);
  for (int i = 0; i < n; ++i) {
    out.grant(order[static_cast<std::size_t>(i)], counts[static_cast<std::size_t>(i)]);
  }
  return out;
}

const UeSession& SchedulingContext::session(UeId ue) const {
  const UeSession* s = find_session(sessions, ue);
  if (!s) throw StructuralError("no active session for UE " + std::to_string(ue));
  return *s;
}

RateEstimate SchedulingContext::estimator(int ordered_users) const {
  return beamforming_estimator(budget, antennas, ordered_users, channel_gains);
}

OrderedUeSet prioritize(PriorityMethod method, const SchedulingContext& ctx) {
  return prioritize(method, ctx.sessions, ctx.link, ctx.tti);
}

AntennaAllocation allocate(const AllocMethod& method, const OrderedUeSet& order,
                           const SchedulingContext& ctx) {
  const RateEstimate est = ctx.estimator(static_cast<int>(order.size()));
  switch (method.family) {
    case AllocFamily::kFso:
      return allocate_fso(order, ctx.sessions, ctx.antennas, est, ctx.tti_seconds);
    case AllocFamily::kMinG:
      return allocate_ming(order, ctx.sessions, ctx.antennas, est,
                           ctx.tti_seconds, method.iota);
    case AllocFamily::kPf: {
      static const PfHistory kEmpty;
      return allocate_pf(order, ctx.antennas, est, ctx.pf ? *ctx.pf : kEmpty,
                         ctx.params, method.iota);
    }
  }
  return {};
}

namespace {

double pf_ratio(const SchedulingContext& ctx, const RateEstimate& est, UeId ue,
                int share) {
  const double hist = ctx.pf ? ctx.pf->get(ue) : 0.0;
  return est(ue, share) / std::max(hist, ctx.params.pf_history_floor_bps);
}

std::vector<const UeSession*> backlogged(const SchedulingContext& ctx) {
  std::vector<const UeSession*> out;
  for (const UeSession* s : ctx.sessions) {
    if (s->backlogged()) out.push_back(s);
  }
  return out;
}

OrderedUeSet rank_by_score(std::vector<const UeSession*> list,
                           const std::function<double(const UeSession&)>& score) {
  std::vector<std::pair<double, UeId>> keyed;
  for (const UeSession* s : list) keyed.emplace_back(-score(*s), s->ue_id);
  std::sort(keyed.begin(), keyed.end());
  OrderedUeSet out;
  for (const auto& [k, ue] : keyed) out.push_back(ue);
  return out;
}

}  // namespace

SchedulePlan baseline_orfa(const SchedulingContext& ctx) {
  SchedulePlan plan;
  plan.precoder = PrecoderKind::kMmseAs;
  const auto list = backlogged(ctx);
  if (list.empty() || ctx.antennas < 1) return plan;
  const int share = std::max(1, ctx.antennas / static_cast<int>(list.size()));
  const RateEstimate rank_est = ctx.estimator(static_cast<int>(list.size()));
  plan.order = rank_by_score(list, [&](const UeSession& s) {
    return pf_ratio(ctx, rank_est, s.ue_id, share);
  });

  const std::size_t pool =
      std::min(plan.order.size(), static_cast<std::size_t>(ctx.antennas));
  const RateEstimate est = ctx.estimator(static_cast<int>(pool));
  std::vector<int> counts(pool, 0);
  for (int a = 0; a < ctx.antennas; ++a) {
    std::size_t best = 0;
    double best_gain = -1.0;
    for (std::size_t i = 0; i < pool; ++i) {
      const UeId ue = plan.order[i];
      const double before = counts[i] == 0 ? 0.0 : est(ue, counts[i]);
      const double gain = est(ue, counts[i] + 1) - before;
      if (gain > best_gain + 1e-9 * std::abs(best_gain)) {
        best_gain = gain;
        best = i;
      }
    }
    ++counts[best];
  }
  for (std::size_t i = 0; i < pool; ++i) plan.allocation.grant(plan.order[i], counts[i]);
  return plan;
}

SchedulePlan baseline_ublaa(const SchedulingContext& ctx) {
  SchedulePlan plan;
  plan.precoder = PrecoderKind::kAs;
  const auto list = backlogged(ctx);
  if (list.empty() || ctx.antennas < 1) return plan;
  const RateEstimate est = ctx.estimator(static_cast<int>(list.size()));

  // Urgency grows with the share of the loss budget already spent (counting
  // a head packet that expires after this TTI) and with the GBR shortfall.
  std::vector<double> weight;
  for (const UeSession* s : list) {
    const double at_risk = s->head_deadline() <= ctx.tti ? 1.0 : 0.0;
    const double budget =
        std::max(s->type.error_rate * static_cast<double>(s->generated), 1.0);
    double w = 1.0 + std::min((static_cast<double>(s->expired) + at_risk) / budget, 10.0);
    if (s->type.has_gbr()) {
      w += std::max(0.0, 1.0 - s->rate_history.average_bps() / *s->type.gbr_bps);
    }
    weight.push_back(w);
  }

  std::vector<int> counts(list.size(), 0);
  std::vector<std::size_t> first_grant;
  auto served = [&](std::size_t i, int n) {
    if (n == 0) return 0.0;
    return std::min(est(list[i]->ue_id, n) * ctx.tti_seconds, list[i]->remaining_bits());
  };
  for (int a = 0; a < ctx.antennas; ++a) {
    std::size_t best = list.size();
    double best_utility = 0.0;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const double need = list[i]->remaining_bits();
      if (need <= 0.0) continue;
      const double gain = weight[i] * (served(i, counts[i] + 1) - served(i, counts[i])) / need;
      if (gain > best_utility) {
        best_utility = gain;
        best = i;
      }
    }
    if (best == list.size()) break;
    if (counts[best] == 0) first_grant.push_back(best);
    ++counts[best];
  }
  for (std::size_t i : first_grant) {
    plan.order.push_back(list[i]->ue_id);
    plan.allocation.grant(list[i]->ue_id, counts[i]);
  }
  return plan;
}

SchedulePlan baseline_lwdf_pf(const SchedulingContext& ctx) {
  SchedulePlan plan;
  plan.precoder = PrecoderKind::kAce;
  const auto list = backlogged(ctx);
  if (list.empty() || ctx.antennas < 1) return plan;
  const int share = std::max(1, ctx.antennas / static_cast<int>(list.size()));
  const RateEstimate est = ctx.estimator(static_cast<int>(list.size()));
  plan.order = rank_by_score(list, [&](const UeSession& s) {
    const double window =
        static_cast<double>(std::max<Tti>(latency_ttis(s.type, ctx.tti_seconds), 1));
    const double delay =
        static_cast<double>(ctx.tti - s.earliest_arrival() + 1) / window;
    const double weight = -std::log(std::max(s.type.error_rate, 1e-12));
    return weight * delay * pf_ratio(ctx, est, s.ue_id, share);
  });
  const int top = std::clamp(ratio_count(ctx.params.lwdf_top_fraction, plan.order.size()),
                             1, std::min(static_cast<int>(plan.order.size()), ctx.antennas));
  const std::vector<double> even(static_cast<std::size_t>(top), 1.0);
  const std::vector<int> counts = apportion(even, ctx.antennas);
  for (int i = 0; i < top; ++i) {
    plan.allocation.grant(plan.order[static_cast<std::size_t>(i)],
                          counts[static_cast<std::size_t>(i)]);
  }
  return plan;
}

}  // namespace mmsched
