#include <algorithm>
#include <cmath>
#include <numeric>

#include "icn/iac.hpp"

namespace icn {

namespace {

/// Doubled midranks (2 * rank) of the pooled sample, so ties stay integral.
std::vector<long> doubled_midranks(std::span<const double> pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
  std::vector<long> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    // ranks i+1 .. j+1 averaged, doubled: (i+1 + j+1)
    const long r2 = static_cast<long>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r2;
    i = j + 1;
  }
  return ranks;
}

/// P(|2U - nm| >= observed_dev) over all ways of drawing n of the pooled
/// doubled ranks, by dynamic programming over (items taken, rank sum).
/// The deviation is symmetric in the two samples, so n should be the smaller.
double exact_two_sided(const std::vector<long>& ranks2, std::size_t n, long observed_dev) {
  const std::size_t total = ranks2.size();
  const std::size_t m = total - n;
  const long max_sum = std::accumulate(ranks2.begin(), ranks2.end(), 0L);
  // ways[k][s]: subsets of size k with doubled rank sum s
  std::vector<std::vector<double>> ways(n + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
  ways[0][0] = 1.0;
  for (long r : ranks2) {
    for (std::size_t k = std::min(n, total); k >= 1; --k) {
      auto& dst = ways[k];
      const auto& src = ways[k - 1];
      for (long s = max_sum; s >= r; --s) dst[static_cast<std::size_t>(s)] += src[static_cast<std::size_t>(s - r)];
    }
  }
  const long nm = static_cast<long>(n * m);
  const long offset = static_cast<long>(n * (n + 1));  // 2 * n(n+1)/2
  double hit = 0.0;
  double all = 0.0;
  for (long s = 0; s <= max_sum; ++s) {
    const double w = ways[n][static_cast<std::size_t>(s)];
    if (w == 0.0) continue;
    all += w;
    if (std::labs(s - offset - nm) >= observed_dev) hit += w;
  }
  return std::min(1.0, hit / all);
}

}  // namespace

MannWhitney mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ArgumentError("Mann-Whitney U test needs two non-empty samples");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks2 = doubled_midranks(pooled);

  long rank_sum_2 = 0;
  for (std::size_t i = 0; i < n; ++i) rank_sum_2 += ranks2[i];
  const long u2 = rank_sum_2 - static_cast<long>(n * (n + 1));
  const double u = static_cast<double>(u2) / 2.0;

  if (n * m <= kMannWhitneyExactLimit) {
    const long dev = std::labs(u2 - static_cast<long>(n * m));  // u2 is 2U
    return {u, exact_two_sided(ranks2, std::min(n, m), dev)};
  }

  // Normal approximation with tie correction and continuity correction.
  const double N = static_cast<double>(n + m);
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double nm = static_cast<double>(n) * static_cast<double>(m);
  const double var = nm / 12.0 * ((N + 1.0) - tie_term / (N * (N - 1.0)));
  if (var <= 0.0) return {u, 1.0};
  const double z = std::max(0.0, std::abs(u - nm / 2.0) - 0.5) / std::sqrt(var);
  return {u, std::min(1.0, std::erfc(z / std::sqrt(2.0)))};
}

}  // namespace icn
