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

#include "mmsched/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mmsched {

namespace {

void check_counts(const CMatrix& h, std::span<const int> counts) {
  if (static_cast<Eigen::Index>(counts.size()) != h.rows()) {
    throw StructuralError("antenna counts do not match channel rows");
  }
  long total = 0;
  for (int n : counts) {
    if (n < 1) throw StructuralError("scheduled UE with no antennas");
    total += n;
  }
  if (total > h.cols()) {
    throw StructuralError("antenna allocation exceeds the array (" +
                          std::to_string(total) + " > " +
                          std::to_string(h.cols()) + ")");
  }
}


// Sum-rate of the hybrid precoder for one assignment without materializing
// the M x K precoding matrix: rows of P are rows of F_BB (or zero), so the
// per-antenna constraint reduces to the per-chain row sums of |F_BB|.
double score_assignment(const CMatrix& h, const AnalogAssignment& analog,
                        const LinkBudget& link) {
  const CMatrix h_eff = effective_channel(h, analog);
  DigitalStage digital = zf_baseband(h_eff);
  const double peak = digital.weights.cwiseAbs().rowwise().sum().maxCoeff();
  if (peak > 1.0) digital.weights /= peak;
  const CMatrix g = h_eff * digital.weights;
  const Eigen::Index users = g.cols();
  const double share = link.rho / static_cast<double>(users);
  double total = 0.0;
  for (Eigen::Index k = 0; k < users; ++k) {
    double interference = 0.0;
    for (Eigen::Index j = 0; j < users; ++j) {
      if (j != k) interference += std::norm(g(k, j));
    }
    const double s = share * std::norm(g(k, k)) /
                     (link.sigma2 + share * interference);
    total += rate(s, link.bandwidth_hz);
  }
  return total;
}

}  // namespace

std::vector<int> AnalogAssignment::counts(std::size_t users) const {
  std::vector<int> out(users, 0);
  for (int o : owner) {
    if (o >= 0) ++out.at(static_cast<std::size_t>(o));
  }
  return out;
}

CMatrix AnalogAssignment::matrix(std::size_t users) const {
  CMatrix f = CMatrix::Zero(static_cast<Eigen::Index>(owner.size()),
                            static_cast<Eigen::Index>(users));
  for (std::size_t m = 0; m < owner.size(); ++m) {
    if (owner[m] >= 0) f(static_cast<Eigen::Index>(m), owner[m]) = 1.0;
  }
  return f;
}

void CeSearchParams::validate() const {
  if (n_candidates < 1) throw ConfigError("ce candidates must be >= 1");
  if (n_elites < 0 || n_elites >= n_candidates) {
    throw ConfigError("ce elites must satisfy 0 <= elites < candidates");
  }
  if (n_iterations < 1) throw ConfigError("ce iterations must be >= 1");
  if (!(smoothing > 0.0 && smoothing <= 1.0)) {
    throw ConfigError("ce smoothing must lie in (0, 1]");
  }
}

DigitalStage zf_baseband(const CMatrix& h_eff, double epsilon) {
  const Eigen::Index users = h_eff.rows();
  const Eigen::Index width = h_eff.cols();
  DigitalStage out;
  if (users == 0) {
    out.weights.resize(width, 0);
    return out;
  }
  if (width >= users) {
    // h^H = Q R, so h = R^H Q^H and W = Q R^{-H} is the right inverse.
    Eigen::HouseholderQR<CMatrix> qr(h_eff.adjoint());
    const CMatrix r = qr.matrixQR().topRows(users).triangularView<Eigen::Upper>();
    const Eigen::VectorXd diag = r.diagonal().cwiseAbs();
    const double largest = diag.maxCoeff();
    if (largest > 0.0 && diag.minCoeff() > 1e-10 * largest) {
      const CMatrix q = qr.householderQ() * CMatrix::Identity(width, users);
      const CMatrix r_inv_h = r.adjoint().triangularView<Eigen::Lower>().solve(
          CMatrix::Identity(users, users));
      out.weights = q * r_inv_h;
      return out;
    }
  }
  const CMatrix gram = h_eff * h_eff.adjoint();
  const double scale = gram.diagonal().real().mean();
  const double ridge = epsilon * (scale > 0.0 ? scale : 1.0);
  out.weights = h_eff.adjoint() *
                (gram + ridge * CMatrix::Identity(users, users)).ldlt().solve(
                    CMatrix::Identity(users, users));
  out.regularized = true;
  return out;
}

DigitalStage mmse_baseband(const CMatrix& h_eff, double lambda) {
  const Eigen::Index users = h_eff.rows();
  const CMatrix gram = h_eff * h_eff.adjoint() +
                       lambda * CMatrix::Identity(users, users);
  return {h_eff.adjoint() * gram.ldlt().solve(CMatrix::Identity(users, users)),
          false};
}

double max_antenna_gain(const CMatrix& p) {
  if (p.size() == 0) return 0.0;
  return p.cwiseAbs().rowwise().sum().maxCoeff();
}

PrecodingMatrix normalize_gain(PrecodingMatrix p) {
  const double peak = max_antenna_gain(p.entries);
  if (peak > 1.0 && std::isfinite(peak)) p.entries /= peak;
  return p;
}

double sum_rate(const CMatrix& h, const CMatrix& p, const LinkBudget& link) {
  double total = 0.0;
  for (double s : sinr(h, p, link.rho, link.sigma2)) {
    total += rate(s, link.bandwidth_hz);
  }
  return total;
}

CMatrix effective_channel(const CMatrix& h, const AnalogAssignment& analog) {
  if (static_cast<Eigen::Index>(analog.owner.size()) != h.cols()) {
    throw StructuralError("assignment size does not match antenna count");
  }
  CMatrix h_eff = CMatrix::Zero(h.rows(), h.rows());
  for (std::size_t m = 0; m < analog.owner.size(); ++m) {
    const int o = analog.owner[m];
    if (o >= 0) h_eff.col(o) += h.col(static_cast<Eigen::Index>(m));
  }
  return h_eff;
}

PrecodingMatrix hybrid_precoder(const ChannelMatrix& h,
                                const AnalogAssignment& analog,
                                DigitalKind kind, double mmse_lambda) {
  const auto users = static_cast<std::size_t>(h.rows());
  const CMatrix h_eff = effective_channel(h.entries, analog);
  const DigitalStage digital = kind == DigitalKind::kZeroForcing
                                   ? zf_baseband(h_eff)
                                   : mmse_baseband(h_eff, mmse_lambda);
  PrecodingMatrix p;
  p.entries = analog.matrix(users) * digital.weights;
  p.column_map = h.ue_index_map;
  p.regularized = digital.regularized;
  return normalize_gain(std::move(p));
}

AnalogAssignment greedy_assignment(const CMatrix& h,
                                   std::span<const int> counts) {
  check_counts(h, counts);
  struct Pair {
    double magnitude;
    int ue;
    int antenna;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(h.size()));
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    for (Eigen::Index m = 0; m < h.cols(); ++m) {
      pairs.push_back({std::abs(h(k, m)), static_cast<int>(k),
                       static_cast<int>(m)});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return a.magnitude > b.magnitude;
  });
  AnalogAssignment out;
  out.owner.assign(static_cast<std::size_t>(h.cols()), AnalogAssignment::kUnused);
  std::vector<int> budget(counts.begin(), counts.end());
  int left = std::accumulate(budget.begin(), budget.end(), 0);
  for (const Pair& p : pairs) {
    if (left == 0) break;
    auto& slot = out.owner[static_cast<std::size_t>(p.antenna)];
    if (slot != AnalogAssignment::kUnused || budget[p.ue] == 0) continue;
    slot = p.ue;
    --budget[p.ue];
    --left;
  }
  return out;
}

AssignmentDistribution AssignmentDistribution::from_counts(
    std::size_t antennas, std::span<const int> counts) {
  const auto users = static_cast<Eigen::Index>(counts.size());
  AssignmentDistribution d;
  d.probabilities.resize(static_cast<Eigen::Index>(antennas), users + 1);
  const double m = static_cast<double>(antennas);
  const int used = std::accumulate(counts.begin(), counts.end(), 0);
  for (Eigen::Index c = 0; c < users; ++c) {
    d.probabilities.col(c).setConstant(counts[static_cast<std::size_t>(c)] / m);
  }
  d.probabilities.col(users).setConstant((m - used) / m);
  return d;
}

AnalogAssignment sample_assignment(const AssignmentDistribution& dist,
                                   std::span<const int> counts, Rng& rng) {
  const auto antennas = static_cast<std::size_t>(dist.probabilities.rows());
  const auto users = counts.size();
  std::vector<int> capacity(counts.begin(), counts.end());
  capacity.push_back(static_cast<int>(antennas) -
                     std::accumulate(counts.begin(), counts.end(), 0));
  std::vector<std::size_t> order(antennas);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  AnalogAssignment out;
  out.owner.assign(antennas, AnalogAssignment::kUnused);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t m : order) {
    const auto row = static_cast<Eigen::Index>(m);
    double mass = 0.0;
    int open = 0;
    for (std::size_t c = 0; c <= users; ++c) {
      if (capacity[c] > 0) {
        mass += dist.probabilities(row, static_cast<Eigen::Index>(c));
        ++open;
      }
    }
    const bool flat = !(mass > 0.0);
    double u = unit(rng) * (flat ? open : mass);
    std::size_t pick = users + 1;
    for (std::size_t c = 0; c <= users; ++c) {
      if (capacity[c] <= 0) continue;
      pick = c;
      u -= flat ? 1.0 : dist.probabilities(row, static_cast<Eigen::Index>(c));
      if (u < 0.0) break;
    }
    --capacity[pick];
    if (pick < users) out.owner[m] = static_cast<int>(pick);
  }
  return out;
}

void refit_distribution(AssignmentDistribution& dist,
                        std::span<const AnalogAssignment> elites,
                        std::span<const double> elite_weights,
                        double smoothing) {
  if (elites.empty()) return;
  const Eigen::Index unused = dist.probabilities.cols() - 1;
  Eigen::MatrixXd freq =
      Eigen::MatrixXd::Zero(dist.probabilities.rows(), dist.probabilities.cols());
  for (std::size_t e = 0; e < elites.size(); ++e) {
    const auto& owner = elites[e].owner;
    for (std::size_t m = 0; m < owner.size(); ++m) {
      const Eigen::Index c = owner[m] >= 0 ? owner[m] : unused;
      freq(static_cast<Eigen::Index>(m), c) += elite_weights[e];
    }
  }
  dist.probabilities = smoothing * freq + (1.0 - smoothing) * dist.probabilities;
}

SearchResult cross_entropy_search(const ChannelMatrix& h,
                                  std::span<const int> counts,
                                  const CeSearchParams& params,
                                  const LinkBudget& link, std::uint64_t seed,
                                  EliteWeighting weighting) {
  params.validate();
  check_counts(h.entries, counts);
  const auto antennas = static_cast<std::size_t>(h.antennas());
  const auto n = static_cast<std::size_t>(params.n_candidates);
  const auto n_elite = static_cast<std::size_t>(params.n_elites);

  Rng rng = make_rng({seed, static_cast<std::uint64_t>(Stream::kSearch)});
  AssignmentDistribution dist = AssignmentDistribution::from_counts(antennas, counts);

  SearchResult result;
  result.best_sum_rate = -std::numeric_limits<double>::infinity();
  std::vector<AnalogAssignment> candidates(n);
  std::vector<double> scores(n);
  std::vector<std::size_t> rank(n);
  std::vector<AnalogAssignment> elites;
  std::vector<double> weights;

  for (int it = 0; it < params.n_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      candidates[i] = sample_assignment(dist, counts, rng);
      scores[i] = score_assignment(h.entries, candidates[i], link);
      if (scores[i] > result.best_sum_rate) {
        result.best_sum_rate = scores[i];
        result.assignment = candidates[i];
      }
    }
    result.incumbent_history.push_back(result.best_sum_rate);
    if (n_elite == 0) continue;

    std::iota(rank.begin(), rank.end(), 0);
    std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
      return scores[a] > scores[b];
    });
    elites.clear();
    weights.clear();
    double total = 0.0;
    for (std::size_t e = 0; e < n_elite; ++e) {
      elites.push_back(candidates[rank[e]]);
      total += scores[rank[e]];
    }
    for (std::size_t e = 0; e < n_elite; ++e) {
      const bool adaptive = weighting == EliteWeighting::kSumRate && total > 0.0;
      weights.push_back(adaptive ? scores[rank[e]] / total
                                 : 1.0 / static_cast<double>(n_elite));
    }
    refit_distribution(dist, elites, weights, params.smoothing);
  }
  result.precoder = hybrid_precoder(h, result.assignment);
  return result;
}

PrecodingMatrix precode_as(const ChannelMatrix& h, std::span<const int> counts) {
  return hybrid_precoder(h, greedy_assignment(h.entries, counts));
}

PrecodingMatrix precode_ce(const ChannelMatrix& h, std::span<const int> counts,
                           const CeSearchParams& params, const LinkBudget& link,
                           std::uint64_t seed) {
  return cross_entropy_search(h, counts, params, link, seed,
                              EliteWeighting::kUniform)
      .precoder;
}

PrecodingMatrix precode_ace(const ChannelMatrix& h, std::span<const int> counts,
                            const CeSearchParams& params,
                            const LinkBudget& link, std::uint64_t seed) {
  return cross_entropy_search(h, counts, params, link, seed,
                              EliteWeighting::kSumRate)
      .precoder;
}

}  // namespace mmsched
