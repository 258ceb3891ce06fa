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

namespace mmsched {

double mean(std::span<const double> x);
double sample_stddev(std::span<const double> x);

struct PairedTest {
  double mean_difference = 0.0;
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_greater = 1.0;  // one-sided p-value for mean(a - b) > 0
};

// Paired Student t test on a - b. Zero-variance differences give p = 0 for a
// positive mean difference and p = 1 otherwise.
PairedTest paired_t_test(std::span<const double> a, std::span<const double> b);

// Ranks with ties sharing their average rank, 1-based.
std::vector<double> average_ranks(std::span<const double> x);

// Spearman rank correlation; NaN when either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

// One-sided sign test: P(X >= positives) for X ~ Binomial(trials, 1/2).
double sign_test_p(std::size_t positives, std::size_t trials);

}  // namespace mmsched
