#include <algorithm>
#include <map>

#include "icn/iac.hpp"

namespace icn {

CurvePair min_max_curves(const EventTrace& trace, std::string_view e, std::size_t w_delta) {
  if (w_delta == 0) throw ArgumentError("window size threshold must be >= 1");
  const auto& ev = trace.events();
  const std::size_t n = ev.size();

  // prefix[i] = occurrences of e in ev[0, i)
  std::vector<std::size_t> prefix(n + 1, 0);
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < n; ++i) {
    const bool hit = ev[i] == e;
    prefix[i + 1] = prefix[i] + (hit ? 1 : 0);
    if (hit) starts.push_back(i);
  }
  if (starts.empty()) throw EventNotFoundError("event '" + std::string(e) + "' does not occur in the trace");

  // A full window of size w exists iff the first occurrence leaves w events.
  const std::size_t max_w = std::min(w_delta, n - starts.front());
  CurvePair out{{Symbol(e), CurveKind::Min, {}}, {Symbol(e), CurveKind::Max, {}}};
  out.min.values.reserve(max_w);
  out.max.values.reserve(max_w);
  for (std::size_t w = 1; w <= max_w; ++w) {
    std::size_t lo = n;
    std::size_t hi = 0;
    for (std::size_t s : starts) {
      if (s + w > n) break;  // starts are ascending
      const std::size_t c = prefix[s + w] - prefix[s];
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    out.min.values.push_back(static_cast<double>(lo));
    out.max.values.push_back(static_cast<double>(hi));
  }
  return out;
}

std::vector<Symbol> select_feature_events(std::span<const EventTrace> traces, double significance_pct) {
  if (traces.empty()) throw ArgumentError("feature event selection needs at least one trace");
  if (!(significance_pct > 0.0 && significance_pct <= 100.0))
    throw ArgumentError("significance percentage must lie in (0, 100]");

  std::map<Symbol, std::size_t> freq;
  std::size_t total = 0;
  for (const auto& t : traces) {
    for (const auto& e : t.events()) ++freq[e];
    total += t.size();
  }
  if (total == 0) return {};

  std::vector<std::pair<Symbol, std::size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<Symbol> chosen;
  std::size_t cumulative = 0;
  for (const auto& [sym, count] : ranked) {
    chosen.push_back(sym);
    cumulative += count;
    // cumulative / total >= pct / 100
    if (static_cast<double>(cumulative) * 100.0 >= significance_pct * static_cast<double>(total)) break;
  }
  return chosen;
}

}  // namespace icn
