#pragma once

// Wilcoxon rank-sum (Mann-Whitney U) two-sided test and descriptive stats
// for the expert-vs-resident comparisons.
//
// Observations from both groups are pooled and ranked, ties receiving
// midranks. The statistic reported is U1 = R1 - n1(n1+1)/2, the U of the
// first group. With no ties and n1+n2 <= 20 the p-value is exact: the null
// distribution of U is built by dynamic programming over rank subset sums
// (counting size-n1 subsets of {1..N} by sum), and the two-sided p counts
// assignments at least as far from the mean n1*n2/2 as the observed U.
// Larger samples, or any ties, use the normal approximation with the tie
// variance correction and a 0.5 continuity correction.
//
// Rank-based, so the result is exactly invariant under any strictly
// monotone transformation of the pooled values (scaling included).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "skillgauge/errors.hpp"

namespace skillgauge::stats {

struct SampleGroup {
  std::string name;
  std::vector<double> values;
};

enum class TestMethod { Exact, NormalApprox };

inline std::string_view to_string(TestMethod m) {
  return m == TestMethod::Exact ? "Exact" : "NormalApprox";
}

struct TestResult {
  double u_statistic = 0;  // U of the first group
  double p_value = 1;      // two-sided
  TestMethod method = TestMethod::Exact;
  int n1 = 0;
  int n2 = 0;
  double alpha = 0.05;
  bool significant = false;  // p_value < alpha
};

struct Descriptive {
  double mean = 0;
  double stddev = 0;  // sample standard deviation (n-1); 0 for singletons
  int n = 0;
};

inline Descriptive describe(const SampleGroup& group) {
  if (group.values.empty()) throw EmptyInput("describe: empty group");
  Descriptive d;
  d.n = static_cast<int>(group.values.size());
  double sum = 0;
  for (double v : group.values) sum += v;
  d.mean = sum / d.n;
  if (d.n > 1) {
    double ss = 0;
    for (double v : group.values) ss += (v - d.mean) * (v - d.mean);
    d.stddev = std::sqrt(ss / (d.n - 1));
  }
  return d;
}

namespace detail {

struct RankSummary {
  double r1 = 0;                 // sum of (mid)ranks of group 1
  bool has_ties = false;
  double tie_term = 0;           // sum of t^3 - t over tie groups
};

inline RankSummary midranks(const std::vector<double>& a,
                            const std::vector<double>& b) {
  struct Tagged {
    double value;
    bool first_group;
  };
  std::vector<Tagged> pooled;
  pooled.reserve(a.size() + b.size());
  for (double v : a) pooled.push_back({v, true});
  for (double v : b) pooled.push_back({v, false});
  std::sort(pooled.begin(), pooled.end(),
            [](const Tagged& x, const Tagged& y) { return x.value < y.value; });

  RankSummary s;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].value == pooled[i].value) ++j;
    const double t = static_cast<double>(j - i);
    const double midrank = (static_cast<double>(i + j) + 1.0) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (pooled[k].first_group) s.r1 += midrank;
    if (t > 1) {
      s.has_ties = true;
      s.tie_term += t * t * t - t;
    }
    i = j;
  }
  return s;
}

// dist[u] = number of size-n1 subsets of ranks {1..N} whose U value is u,
// u in [0, n1*n2]. Counts fit comfortably in 64 bits for N <= 20.
inline std::vector<std::uint64_t> exact_u_distribution(int n1, int n2) {
  const int N = n1 + n2;
  const int min_sum = n1 * (n1 + 1) / 2;
  const int max_sum = n1 * (2 * N - n1 + 1) / 2;
  // count[k][s] = subsets of size k with rank sum s, over items 1..N
  std::vector<std::vector<std::uint64_t>> count(
      static_cast<std::size_t>(n1) + 1,
      std::vector<std::uint64_t>(static_cast<std::size_t>(max_sum) + 1, 0));
  count[0][0] = 1;
  for (int item = 1; item <= N; ++item) {
    for (int k = std::min(item, n1); k >= 1; --k) {
      for (int s = max_sum; s >= item; --s) {
        count[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)] +=
            count[static_cast<std::size_t>(k) - 1]
                 [static_cast<std::size_t>(s - item)];
      }
    }
  }
  std::vector<std::uint64_t> dist(static_cast<std::size_t>(n1) * n2 + 1, 0);
  for (int s = min_sum; s <= max_sum; ++s)
    dist[static_cast<std::size_t>(s - min_sum)] =
        count[static_cast<std::size_t>(n1)][static_cast<std::size_t>(s)];
  return dist;
}

inline double exact_two_sided_p(int n1, int n2, double u1) {
  const auto dist = exact_u_distribution(n1, n2);
  std::uint64_t total = 0;
  for (std::uint64_t c : dist) total += c;
  // |2u - n1*n2| >= |2*u1 - n1*n2| counts both tails in integer arithmetic.
  const double observed_dev = std::abs(2.0 * u1 - n1 * n2);
  std::uint64_t tail = 0;
  for (std::size_t u = 0; u < dist.size(); ++u) {
    if (std::abs(2.0 * static_cast<double>(u) - n1 * n2) >= observed_dev)
      tail += dist[u];
  }
  return static_cast<double>(tail) / static_cast<double>(total);
}

inline double normal_two_sided_p(int n1, int n2, double u1, double tie_term) {
  const double N = n1 + n2;
  const double mu = n1 * static_cast<double>(n2) / 2.0;
  const double variance =
      (n1 * static_cast<double>(n2) / 12.0) *
      ((N + 1.0) - tie_term / (N * (N - 1.0)));
  if (variance <= 0)
    throw DegenerateError("rank_sum_test: zero variance (all values tied)");
  // 0.5 continuity correction toward the mean.
  const double dev = std::max(0.0, std::abs(u1 - mu) - 0.5);
  const double z = dev / std::sqrt(variance);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

}  // namespace detail

// Threshold below which (and only without ties) the permutation distribution
// of U is enumerated exactly.
inline constexpr int kExactLimit = 20;

inline TestResult rank_sum_test(const SampleGroup& a, const SampleGroup& b,
                                double alpha = 0.05) {
  if (a.values.empty() || b.values.empty())
    throw EmptyInput("rank_sum_test: both groups must be non-empty");
  for (const auto* g : {&a, &b}) {
    for (double v : g->values)
      if (!std::isfinite(v))
        throw ValidationError("rank_sum_test: non-finite value in group '" +
                              g->name + "'");
  }
  const int n1 = static_cast<int>(a.values.size());
  const int n2 = static_cast<int>(b.values.size());

  bool all_identical = true;
  for (double v : a.values)
    if (v != a.values.front()) all_identical = false;
  for (double v : b.values)
    if (v != a.values.front()) all_identical = false;
  if (all_identical)
    throw DegenerateError(
        "rank_sum_test: all values identical across both groups");

  const detail::RankSummary ranks = detail::midranks(a.values, b.values);
  const double u1 = ranks.r1 - n1 * (n1 + 1.0) / 2.0;

  TestResult result;
  result.u_statistic = u1;
  result.n1 = n1;
  result.n2 = n2;
  result.alpha = alpha;
  if (!ranks.has_ties && n1 + n2 <= kExactLimit) {
    result.method = TestMethod::Exact;
    result.p_value = detail::exact_two_sided_p(n1, n2, u1);
  } else {
    result.method = TestMethod::NormalApprox;
    result.p_value = detail::normal_two_sided_p(n1, n2, u1, ranks.tie_term);
  }
  result.significant = result.p_value < alpha;
  return result;
}

}  // namespace skillgauge::stats
