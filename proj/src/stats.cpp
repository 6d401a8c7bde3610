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

#include "seminv/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace seminv {

namespace {

// auto_select switches to the normal approximation above this combined size;
// 2^16 assignment masks keep exact enumeration instant.
constexpr int kExactThreshold = 16;

void require_finite(const std::vector<double>& values, const char* who) {
  for (double v : values) {
    if (!std::isfinite(v)) throw StatsError(std::string(who) + ": non-finite value in input");
  }
}

// sum over tie groups of (t^3 - t).
double tie_term(std::vector<double> sorted) {
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  size_t i = 0;
  while (i < sorted.size()) {
    size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    double t = static_cast<double>(j - i);
    total += t * t * t - t;
    i = j;
  }
  return total;
}

bool has_ties(std::vector<double> pooled) {
  std::sort(pooled.begin(), pooled.end());
  return std::adjacent_find(pooled.begin(), pooled.end()) != pooled.end();
}

// Exact two-sided p: fraction of the C(n+m, n) equally likely rank
// assignments whose min(U_a, U_b) is <= the observed one. Tie-free only, so
// ranks are the permutation 1..N and U depends only on which ranks go to a.
double exact_two_sided_p(int n_a, int n_b, double u_observed) {
  const int n = n_a + n_b;
  const double base_a = n_a * (n_a + 1) / 2.0;
  const double max_u = static_cast<double>(n_a) * n_b;
  uint64_t total = 0;
  uint64_t extreme = 0;
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != n_a) continue;
    ++total;
    double rank_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) rank_sum += i + 1;
    }
    double u_a = rank_sum - base_a;
    double u_min = std::min(u_a, max_u - u_a);
    if (u_min <= u_observed + 1e-12) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace

std::string test_method_to_string(TestMethod m) {
  switch (m) {
    case TestMethod::exact: return "exact";
    case TestMethod::normal_approx: return "normal-approx";
    case TestMethod::chi_square_approx: return "chi-square-approx";
  }
  return "unknown";
}

std::vector<double> midranks(const std::vector<double>& values) {
  if (values.empty()) throw StatsError("midranks: empty input");
  require_finite(values, "midranks");

  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t i, size_t j) { return values[i] < values[j]; });

  std::vector<double> ranks(values.size(), 0.0);
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // ranks i+1 .. j span this tie group; assign their mean.
    double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k) ranks[order[k]] = mean_rank;
    i = j;
  }
  return ranks;
}

TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                          MannWhitneyMode mode) {
  if (a.empty() || b.empty()) throw StatsError("mann_whitney_u: empty sample");
  require_finite(a, "mann_whitney_u");
  require_finite(b, "mann_whitney_u");

  const int n_a = static_cast<int>(a.size());
  const int n_b = static_cast<int>(b.size());
  const int n = n_a + n_b;

  std::vector<double> pooled;
  pooled.reserve(n);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<double> ranks = midranks(pooled);

  double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + n_a, 0.0);
  double u_a = rank_sum_a - n_a * (n_a + 1) / 2.0;
  double u_b = static_cast<double>(n_a) * n_b - u_a;
  double u = std::min(u_a, u_b);

  const bool tied = has_ties(pooled);
  const double nn = static_cast<double>(n);
  double tie_correction = 1.0 - tie_term(pooled) / (nn * nn * nn - nn);

  bool use_exact = false;
  switch (mode) {
    case MannWhitneyMode::auto_select:
      use_exact = (n <= kExactThreshold) && !tied;
      break;
    case MannWhitneyMode::exact:
      if (tied) throw StatsError("mann_whitney_u: exact method requires tie-free data");
      if (n > kExactThreshold) {
        throw StatsError("mann_whitney_u: combined sample size " + std::to_string(n) +
                         " exceeds exact enumeration threshold " +
                         std::to_string(kExactThreshold));
      }
      use_exact = true;
      break;
    case MannWhitneyMode::approx:
      use_exact = false;
      break;
  }

  TestResult result;
  result.statistic = u;
  result.n_per_group = {n_a, n_b};
  result.tie_correction = tie_correction;

  if (use_exact) {
    result.method = TestMethod::exact;
    result.p_value = exact_two_sided_p(n_a, n_b, u);
    return result;
  }

  result.method = TestMethod::normal_approx;
  const double mean_u = static_cast<double>(n_a) * n_b / 2.0;
  const double variance = static_cast<double>(n_a) * n_b * (nn + 1.0) / 12.0 * tie_correction;
  if (variance <= 0.0) {
    // Every pooled value identical: U is exactly its mean, no evidence either way.
    result.p_value = 1.0;
    return result;
  }
  double z = (std::abs(u - mean_u) - 0.5) / std::sqrt(variance);
  if (z < 0.0) z = 0.0;
  result.p_value = std::min(1.0, 2.0 * normal_sf(z));
  return result;
}

TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw StatsError("kruskal_wallis: fewer than 2 groups");
  std::vector<double> pooled;
  for (size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) {
      throw StatsError("kruskal_wallis: group #" + std::to_string(g + 1) + " is empty");
    }
    require_finite(groups[g], "kruskal_wallis");
    pooled.insert(pooled.end(), groups[g].begin(), groups[g].end());
  }
  const double nn = static_cast<double>(pooled.size());
  if (pooled.size() < 3) throw StatsError("kruskal_wallis: total sample size must be >= 3");

  std::vector<double> ranks = midranks(pooled);

  double h = 0.0;
  size_t offset = 0;
  for (const auto& group : groups) {
    double rank_sum = std::accumulate(ranks.begin() + offset,
                                      ranks.begin() + offset + group.size(), 0.0);
    h += rank_sum * rank_sum / static_cast<double>(group.size());
    offset += group.size();
  }
  h = 12.0 / (nn * (nn + 1.0)) * h - 3.0 * (nn + 1.0);

  double correction = 1.0 - tie_term(pooled) / (nn * nn * nn - nn);
  if (correction == 0.0) throw StatsError("kruskal_wallis: degenerate: all values tied");
  h /= correction;

  TestResult result;
  result.statistic = h;
  result.method = TestMethod::chi_square_approx;
  for (const auto& group : groups) result.n_per_group.push_back(static_cast<int>(group.size()));
  result.tie_correction = correction;
  result.p_value = chi_square_sf(std::max(0.0, h), static_cast<int>(groups.size()) - 1);
  return result;
}

namespace {

// Regularized lower incomplete gamma P(a, x) by series expansion; valid and
// fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by modified Lentz continued
// fraction; valid and fast for x >= a + 1.
double gamma_q_cont_fraction(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi_square_sf(double x, int df) {
  if (df < 1) throw StatsError("chi_square_sf: df must be a positive integer");
  if (std::isnan(x)) throw StatsError("chi_square_sf: NaN input");
  if (x < 0.0) throw StatsError("chi_square_sf: negative x");
  if (x == 0.0) return 1.0;
  const double a = df / 2.0;
  const double xx = x / 2.0;
  if (xx < a + 1.0) return 1.0 - gamma_p_series(a, xx);
  return gamma_q_cont_fraction(a, xx);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace seminv
