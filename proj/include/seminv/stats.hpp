// Copyright 2026 The seminv Authors
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
//
// Nonparametric tests implemented from first principles.
//
// Mann-Whitney U: U is derived from midrank sums, U = min(U_a, U_b). The
// exact two-sided p-value enumerates all C(n+m, n) assignments of ranks to
// the first sample (tie-free data only) and counts assignments at least as
// extreme, i.e. with min(U_a, U_b) <= observed. The normal approximation uses
// the tie-corrected variance n*m/12 * ((N+1) - sum(t^3-t)/(N(N-1))) and a
// 0.5 continuity correction toward the mean.
//
// Kruskal-Wallis H: H = 12/(N(N+1)) * sum R_g^2/n_g - 3(N+1) on midranks,
// divided by the tie correction 1 - sum(t^3-t)/(N^3-N); the p-value is the
// chi-square upper tail with df = groups-1. When every value is tied the
// correction is zero and the statistic is undefined; that is an explicit
// error rather than a silent H = 0.
//
// The tail functions are self-contained: chi_square_sf uses the regularized
// upper incomplete gamma (series / continued fraction), normal_sf uses the
// complementary error function.

#ifndef SEMINV_STATS_HPP
#define SEMINV_STATS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace seminv {

class StatsError : public std::runtime_error {
 public:
  explicit StatsError(const std::string& what) : std::runtime_error(what) {}
};

enum class TestMethod { exact, normal_approx, chi_square_approx };

std::string test_method_to_string(TestMethod m);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  TestMethod method = TestMethod::exact;
  std::vector<int> n_per_group;
  double tie_correction = 1.0;  // 1 - sum(t^3 - t) / (N^3 - N)
};

// Ranks 1..N with tied values assigned the mean of their rank span.
// Throws on empty or non-finite input.
std::vector<double> midranks(const std::vector<double>& values);

enum class MannWhitneyMode { auto_select, exact, approx };

// Two-sided Mann-Whitney U. auto_select picks exact when n+m <= 16 and the
// data are tie-free, the normal approximation otherwise. Requesting exact
// with ties present (or beyond the enumeration threshold) is an error.
// Degenerate input where every value across both samples is identical yields
// p = 1 (zero variance carries no evidence of a difference).
TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                          MannWhitneyMode mode = MannWhitneyMode::auto_select);

// Kruskal-Wallis H across >= 2 non-empty groups, total N >= 3.
TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

// Upper tail of the chi-square distribution, df >= 1, x >= 0.
double chi_square_sf(double x, int df);

// Upper tail of the standard normal distribution.
double normal_sf(double z);

}  // namespace seminv

#endif  // SEMINV_STATS_HPP
