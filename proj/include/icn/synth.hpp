#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "icn/core.hpp"
#include "icn/profiler.hpp"

namespace icn {

/// How many signal parameters an attack overwrites: one, any three, all five,
/// or a uniform pick among those per attacked row.
enum class AttackPattern { One, Three, Five, Mixed };

[[nodiscard]] std::string_view to_string(AttackPattern p) noexcept;
[[nodiscard]] AttackPattern parse_attack_pattern(std::string_view s);
/// Pattern whose compromised count makes an attack at sensitivity `pct`:
/// 20 -> five, 60 -> three, 100 -> one.
[[nodiscard]] AttackPattern pattern_for_sensitivity(int pct);

struct ParameterModel {
  std::string name;
  double psi = 1.0;
  double target_mu = 0.0;
  double rel_std = 0.05;
};

struct GeneratorConfig {
  std::vector<ParameterModel> signals;  ///< parameters that attacks touch
  std::vector<ParameterModel> fillers;  ///< sub-threshold noise columns
  std::map<Group, double> power_offset;  ///< multiplier on the Power target mean
  std::size_t history_rows = 1440;       ///< normal rows per group used only for profiling
  std::size_t rows_per_group = 240;      ///< normal rows per group before the train/test split
  double train_fraction = 0.25;
  double attack_rate = 0.25;
  /// Unset: each sensitivity level gets its matching pattern.
  std::optional<AttackPattern> attack_pattern;
  double trim_fraction = ThresholdProfile::kDefaultTrimFraction;
  std::size_t window_len = ThresholdProfile::kDefaultWindowLen;
  std::size_t cadence = 4;      ///< scan cycles per row
  std::size_t burst_extra = 3;  ///< repeated symbols injected by an attack
  std::int64_t start_ts = 1704067200;
  std::int64_t step_seconds = 60;
  std::uint64_t seed = 42;

  /// Calibrated defaults: five signal parameters plus `extra_params` fillers.
  static GeneratorConfig defaults(std::size_t extra_params = 13);
  static GeneratorConfig from_json(const nlohmann::ordered_json& j);
  [[nodiscard]] nlohmann::ordered_json to_json() const;

  /// Throws ConfigError unless every target mean sits below its threshold.
  void validate() const;
  [[nodiscard]] std::vector<std::string> schema() const;
  [[nodiscard]] std::vector<std::string> signal_names() const;
  [[nodiscard]] std::map<std::string, double> limits() const;
  /// Target mean of `p` in `group` (Power carries the demand offset).
  [[nodiscard]] double group_mu(const ParameterModel& p, Group group) const;
};

/// FNV-1a over the canonical JSON dump of the config, as 16 hex digits.
[[nodiscard]] std::string config_hash(const GeneratorConfig& config);

struct GeneratedTrace {
  DataTrace data;
  RowEvents events;
};

/// `n` labeled-normal rows for `group`. Each value is drawn from
/// N(mu, rel_std * mu) and redrawn until it lies in (0, cap], where cap is the
/// parameter's threshold in `cap_profile` (or the nominal one from the
/// config). Events follow a fixed scan schedule. `first_row` offsets the
/// timestamps.
[[nodiscard]] GeneratedTrace gen_normal(const GeneratorConfig& config, Group group, std::size_t n, Rng& rng,
                                        std::size_t first_row = 0, const ThresholdProfile* cap_profile = nullptr);
/// Convenience form seeded from (config.seed, group).
[[nodiscard]] GeneratedTrace gen_normal(const GeneratorConfig& config, Group group, std::size_t n);

/// The periodic event schedule of one row, optionally with repetition bursts
/// for the `burst` parameters.
[[nodiscard]] EventTrace row_schedule(const GeneratorConfig& config, const std::vector<std::string>& burst = {},
                                      std::size_t burst_scan = 0);

struct AttackOptions {
  AttackPattern pattern = AttackPattern::One;
  double rate = 0.25;
  std::uint64_t seed = 1;
  std::size_t burst_extra = 3;
};

/// Overwrites round(rate * n) uniformly chosen rows: the pattern's signal
/// parameters get values uniform on (P_th, psi] and the row is labeled -1.
/// When `events` is given, each attacked slice repeats every compromised
/// parameter's symbol burst_extra more times at one randomly chosen reading.
[[nodiscard]] DataTrace inject_attacks(const DataTrace& trace, const ThresholdProfile& profile,
                                       const std::vector<std::string>& signals, const AttackOptions& options,
                                       RowEvents* events = nullptr);

struct ScenarioData {
  int s_pct = 20;
  AttackPattern pattern = AttackPattern::Five;
  DataTrace train{std::vector<std::string>{"_"}};
  DataTrace test{std::vector<std::string>{"_"}};
  RowEvents train_events;
  RowEvents test_events;
};

struct GroupCampaign {
  Group group = Group::MD;
  DataTrace history{std::vector<std::string>{"_"}};
  RowEvents history_events;
  ThresholdProfile profile;
  std::vector<ScenarioData> scenarios;  ///< one per sensitivity level, 20/60/100

  [[nodiscard]] const ScenarioData& scenario(int s_pct) const;
};

struct Campaign {
  GeneratorConfig config;
  std::vector<GroupCampaign> groups;  ///< MD, AD, ED, ND

  [[nodiscard]] const GroupCampaign& group(Group g) const;
};

/// Per group: a normal history for profiling, then rows_per_group normal rows
/// split into train/test, with attacks injected into both halves for every
/// sensitivity level.
[[nodiscard]] Campaign gen_campaign(const GeneratorConfig& config);

}  // namespace icn
