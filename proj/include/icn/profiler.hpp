#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "icn/core.hpp"

namespace icn {

/// Per-parameter limits, learned trim means and alarm thresholds.
struct ParameterProfile {
  ParameterSpec spec;
  double delta = 0.0;  ///< tolerance region |psi - mu| / psi
};

class ThresholdProfile {
 public:
  static constexpr double kDefaultTrimFraction = 0.1;
  static constexpr std::size_t kDefaultWindowLen = 1440;

  ThresholdProfile() = default;
  ThresholdProfile(std::vector<ParameterProfile> params, double trim_fraction, std::size_t window_len);

  [[nodiscard]] const std::vector<ParameterProfile>& parameters() const noexcept { return params_; }
  [[nodiscard]] const ParameterProfile& at(std::string_view name) const;
  [[nodiscard]] bool has(std::string_view name) const noexcept;
  [[nodiscard]] double threshold(std::string_view name) const { return at(name).spec.p_th; }
  [[nodiscard]] double trim_fraction() const noexcept { return trim_fraction_; }
  [[nodiscard]] std::size_t window_len() const noexcept { return window_len_; }

  [[nodiscard]] nlohmann::ordered_json to_json() const;
  /// Parameter order follows key order in the document.
  static ThresholdProfile from_json(const nlohmann::ordered_json& j);

 private:
  std::vector<ParameterProfile> params_;
  double trim_fraction_ = kDefaultTrimFraction;
  std::size_t window_len_ = kDefaultWindowLen;
};

/// Mean after discarding floor(trim_fraction * n) values from each end of the
/// sorted input. trim_fraction must lie in [0, 0.5).
[[nodiscard]] double trim_mean(std::span<const double> values, double trim_fraction);

struct Threshold {
  double delta;
  double p_th;
};

/// delta = |psi - mu| / psi, p_th = mu * delta + mu.
[[nodiscard]] Threshold compute_threshold(double psi, double mu);

/// Learns mu per schema parameter from the last `window_len` rows of `train`.
[[nodiscard]] ThresholdProfile build_profile(const DataTrace& train, const std::map<std::string, double>& limits,
                                             double trim_fraction = ThresholdProfile::kDefaultTrimFraction,
                                             std::size_t window_len = ThresholdProfile::kDefaultWindowLen);

/// Number of `features` whose value in `row` strictly exceeds its threshold.
/// `schema` gives the column order of row.values.
[[nodiscard]] std::size_t count_compromised(const DataRow& row, std::span<const std::string> schema,
                                            const ThresholdProfile& profile, std::span<const std::string> features);

}  // namespace icn
