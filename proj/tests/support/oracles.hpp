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

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical routines.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

// Hand-rolled generators for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int integer(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  Complex cnormal() { return Complex(normal(), normal()) / std::sqrt(2.0); }
  CMatrix cmatrix(int rows, int cols, double scale = 1.0) {
    CMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) m(r, c) = scale * cnormal();
    }
    return m;
  }
  // Random positive counts with sum <= m.
  std::vector<int> counts(int users, int m) {
    std::vector<int> c(static_cast<std::size_t>(users), 1);
    int left = m - users;
    for (auto& x : c) {
      const int extra = integer(0, std::max(0, left) / users);
      x += extra;
      left -= extra;
    }
    return c;
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Term-by-term SINR: for each k, the desired power and each interferer are
// accumulated as explicit sums over antennas.
inline std::vector<double> sinr(const CMatrix& h, const CMatrix& p, double rho,
                                double sigma2) {
  const int k_users = static_cast<int>(p.cols());
  std::vector<double> out;
  for (int k = 0; k < h.rows(); ++k) {
    double desired = 0.0;
    double interference = 0.0;
    for (int j = 0; j < k_users; ++j) {
      Complex acc(0.0, 0.0);
      for (int m = 0; m < h.cols(); ++m) acc += h(k, m) * p(m, j);
      const double g = std::norm(acc);
      if (j == k) {
        desired = g;
      } else {
        interference += g;
      }
    }
    const double scale = rho / k_users;
    out.push_back(scale * desired / (sigma2 + scale * interference));
  }
  return out;
}

inline double sum_rate(const CMatrix& h, const CMatrix& p, double rho,
                       double sigma2, double bandwidth) {
  double total = 0.0;
  for (double s : sinr(h, p, rho, sigma2)) total += bandwidth * std::log2(1.0 + s);
  return total;
}

// Every assignment of M antennas giving UE k exactly counts[k] antennas (the
// rest unused), as owner vectors with -1 for unused.
inline std::vector<std::vector<int>> all_assignments(int m,
                                                     const std::vector<int>& counts) {
  std::vector<std::vector<int>> out;
  std::vector<int> owner(static_cast<std::size_t>(m), -1);
  std::vector<int> left = counts;
  std::function<void(int)> rec = [&](int a) {
    if (a == m) {
      if (std::all_of(left.begin(), left.end(), [](int x) { return x == 0; })) {
        out.push_back(owner);
      }
      return;
    }
    int need = 0;
    for (int x : left) need += x;
    if (need > m - a) return;
    if (need < m - a) {
      owner[static_cast<std::size_t>(a)] = -1;
      rec(a + 1);
    }
    for (std::size_t k = 0; k < left.size(); ++k) {
      if (left[k] == 0) continue;
      --left[k];
      owner[static_cast<std::size_t>(a)] = static_cast<int>(k);
      rec(a + 1);
      ++left[k];
    }
    owner[static_cast<std::size_t>(a)] = -1;
  };
  rec(0);
  return out;
}

// ZF on the selected sub-channel via the normal equations, then the global
// per-antenna normalization, computed without the library.
inline CMatrix zf_hybrid(const CMatrix& h, const std::vector<int>& owner) {
  const int k = static_cast<int>(h.rows());
  const int m = static_cast<int>(h.cols());
  CMatrix f_rf = CMatrix::Zero(m, k);
  for (int a = 0; a < m; ++a) {
    if (owner[static_cast<std::size_t>(a)] >= 0) f_rf(a, owner[static_cast<std::size_t>(a)]) = 1.0;
  }
  const CMatrix he = h * f_rf;
  const CMatrix gram = he * he.adjoint();
  const CMatrix f_bb = he.adjoint() * gram.inverse();
  CMatrix p = f_rf * f_bb;
  double worst = 0.0;
  for (int a = 0; a < m; ++a) {
    double row = 0.0;
    for (int j = 0; j < k; ++j) row += std::abs(p(a, j));
    worst = std::max(worst, row);
  }
  if (worst > 1.0) p /= worst;
  return p;
}

// Central finite difference of f at x along coordinate i.
inline double central_difference(const std::function<double()>& f, double& x,
                                 double h) {
  const double x0 = x;
  x = x0 + h;
  const double fp = f();
  x = x0 - h;
  const double fm = f();
  x = x0;
  return (fp - fm) / (2.0 * h);
}

inline double binomial_tail(int k, int n) {
  double total = 0.0;
  for (int i = k; i <= n; ++i) {
    double c = 1.0;
    for (int j = 0; j < i; ++j) c = c * (n - j) / (j + 1);
    total += c * std::pow(0.5, n);
  }
  return total;
}

}  // namespace oracle
