#include "icn/profiler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace icn {

ThresholdProfile::ThresholdProfile(std::vector<ParameterProfile> params, double trim_fraction,
                                   std::size_t window_len)
    : params_(std::move(params)), trim_fraction_(trim_fraction), window_len_(window_len) {
  if (!(trim_fraction_ >= 0.0 && trim_fraction_ < 0.5)) throw ArgumentError("trim fraction must lie in [0, 0.5)");
  if (window_len_ == 0) throw ArgumentError("window length must be positive");
  for (const auto& p : params_) p.spec.validate();
}

const ParameterProfile& ThresholdProfile::at(std::string_view name) const {
  for (const auto& p : params_)
    if (p.spec.name == name) return p;
  throw SchemaError("profile has no parameter '" + std::string(name) + "'");
}

bool ThresholdProfile::has(std::string_view name) const noexcept {
  return std::any_of(params_.begin(), params_.end(), [&](const ParameterProfile& p) { return p.spec.name == name; });
}

nlohmann::ordered_json ThresholdProfile::to_json() const {
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& p : params_) {
    params[p.spec.name] = {{"psi", p.spec.psi}, {"mu", p.spec.mu}, {"delta", p.delta}, {"p_th", p.spec.p_th}};
  }
  return {{"parameters", params}, {"trim_fraction", trim_fraction_}, {"window_len", window_len_}};
}

ThresholdProfile ThresholdProfile::from_json(const nlohmann::ordered_json& j) {
  try {
    std::vector<ParameterProfile> params;
    for (const auto& [name, v] : j.at("parameters").items()) {
      ParameterProfile p;
      p.spec.name = name;
      p.spec.psi = v.at("psi").get<double>();
      p.spec.mu = v.at("mu").get<double>();
      p.spec.p_th = v.at("p_th").get<double>();
      p.delta = v.at("delta").get<double>();
      params.push_back(std::move(p));
    }
    return ThresholdProfile(std::move(params), j.at("trim_fraction").get<double>(),
                            j.at("window_len").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed threshold profile: ") + e.what());
  }
}

double trim_mean(std::span<const double> values, double trim_fraction) {
  if (values.empty()) throw ArgumentError("trim_mean of an empty list");
  if (!(trim_fraction >= 0.0 && trim_fraction < 0.5)) throw ArgumentError("trim fraction must lie in [0, 0.5)");
  const std::size_t n = values.size();
  const auto cut = static_cast<std::size_t>(std::floor(trim_fraction * static_cast<double>(n)));
  if (2 * cut >= n) throw ArgumentError("trim fraction removes every value");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto first = sorted.begin() + static_cast<std::ptrdiff_t>(cut);
  const auto last = sorted.end() - static_cast<std::ptrdiff_t>(cut);
  return std::accumulate(first, last, 0.0) / static_cast<double>(last - first);
}

Threshold compute_threshold(double psi, double mu) {
  if (!(psi > 0.0)) throw ArgumentError("operational limit must be > 0");
  const double delta = std::abs(psi - mu) / psi;
  return {delta, mu * delta + mu};
}

ThresholdProfile build_profile(const DataTrace& train, const std::map<std::string, double>& limits,
                               double trim_fraction, std::size_t window_len) {
  if (train.empty()) throw ArgumentError("cannot build a profile from an empty trace");
  if (window_len == 0) throw ArgumentError("window length must be positive");
  const std::size_t n = train.size();
  const std::size_t first = n > window_len ? n - window_len : 0;

  std::vector<ParameterProfile> params;
  for (std::size_t j = 0; j < train.schema().size(); ++j) {
    const auto& name = train.schema()[j];
    auto lim = limits.find(name);
    if (lim == limits.end()) throw SchemaError("no operational limit for parameter '" + name + "'");
    std::vector<double> window;
    window.reserve(n - first);
    for (std::size_t i = first; i < n; ++i) window.push_back(train.rows()[i].values[j]);
    const double mu = trim_mean(window, trim_fraction);
    const auto th = compute_threshold(lim->second, mu);
    params.push_back({ParameterSpec{name, lim->second, mu, th.p_th}, th.delta});
  }
  return ThresholdProfile(std::move(params), trim_fraction, window_len);
}

std::size_t count_compromised(const DataRow& row, std::span<const std::string> schema,
                              const ThresholdProfile& profile, std::span<const std::string> features) {
  std::size_t count = 0;
  for (const auto& f : features) {
    auto it = std::find(schema.begin(), schema.end(), f);
    if (it == schema.end()) throw SchemaError("row has no value for feature '" + f + "'");
    const auto j = static_cast<std::size_t>(it - schema.begin());
    if (j >= row.values.size()) throw SchemaError("row has no value for feature '" + f + "'");
    if (row.values[j] > profile.threshold(f)) ++count;
  }
  return count;
}

}  // namespace icn
