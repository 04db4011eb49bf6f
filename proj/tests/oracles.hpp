#pragma once

// Deliberately naive reference implementations used to cross-check the
// library. They favour obviousness over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace oracle {

struct Curves {
  std::vector<double> min;  // index w-1
  std::vector<double> max;
};

/// Double loop over every start position holding `e` and every window size;
/// sizes without a full window are dropped from the end.
inline Curves window_enumerator(const std::string& trace, char e, std::size_t w_delta) {
  Curves c;
  for (std::size_t w = 1; w <= w_delta; ++w) {
    bool any = false;
    double lo = 0, hi = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (trace[i] != e || i + w > trace.size()) continue;
      double count = 0;
      for (std::size_t k = i; k < i + w; ++k) count += trace[k] == e ? 1 : 0;
      if (!any) {
        lo = hi = count;
        any = true;
      } else {
        lo = std::min(lo, count);
        hi = std::max(hi, count);
      }
    }
    if (!any) break;
    c.min.push_back(lo);
    c.max.push_back(hi);
  }
  return c;
}

/// U of sample `a` by pairwise comparison (ties count one half).
inline double pairwise_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0;
  for (double x : a)
    for (double y : b) u += x > y ? 1.0 : x == y ? 0.5 : 0.0;
  return u;
}

/// Two-sided exact p by enumerating every way to relabel the pooled sample
/// into groups of sizes |a| and |b|: P(|U - nm/2| >= |U_obs - nm/2|).
inline double permutation_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = a.size(), total = pooled.size();
  const double centre = static_cast<double>(a.size() * b.size()) / 2.0;
  const double observed = std::abs(pairwise_u(a, b) - centre);
  std::size_t hits = 0, all = 0;
  for (std::uint32_t mask = 0; mask < (1u << total); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != n) continue;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < total; ++i) ((mask >> i) & 1u ? x : y).push_back(pooled[i]);
    ++all;
    if (std::abs(pairwise_u(x, y) - centre) >= observed - 1e-9) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(all);
}

/// Smaller root of mu * (2 - mu / psi) = p_th: the trim mean that yields the
/// threshold p_th when mu <= psi.
inline double invert_threshold(double psi, double p_th) {
  // mu^2 / psi - 2 mu + p_th = 0
  const double a = 1.0 / psi, b = -2.0, c = p_th;
  return (-b - std::sqrt(b * b - 4 * a * c)) / (2 * a);
}

}  // namespace oracle
