#pragma once

#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "icn/core.hpp"

namespace icn {

enum class CurveKind { Min, Max };

/// Extreme count of one event over all full windows that start at that event,
/// as a function of window size. values[w - 1] holds the count for size w;
/// window sizes without a full window are absent (the vector stops early).
struct IacCurve {
  Symbol event;
  CurveKind kind = CurveKind::Min;
  std::vector<double> values;

  [[nodiscard]] std::size_t max_window() const noexcept { return values.size(); }
  [[nodiscard]] double at(std::size_t w) const { return values.at(w - 1); }
};

struct CurvePair {
  IacCurve min;
  IacCurve max;
};

/// Minimum and maximum inter-arrival curves of `e` for w = 1..w_delta.
/// Throws EventNotFoundError when `e` does not occur.
[[nodiscard]] CurvePair min_max_curves(const EventTrace& trace, std::string_view e, std::size_t w_delta);

/// Smallest frequency-ordered prefix of event types (ties broken
/// lexicographically) whose cumulative share of all events reaches
/// significance_pct. Returned in selection order.
[[nodiscard]] std::vector<Symbol> select_feature_events(std::span<const EventTrace> traces, double significance_pct);

/// Mean curve and two-sided student's-t confidence band, per window size.
struct CurveBand {
  std::vector<double> mean;
  std::vector<double> lower;
  std::vector<double> upper;

  [[nodiscard]] std::size_t size() const noexcept { return mean.size(); }
};

/// The six aggregated curves kept for one event.
struct EventModel {
  CurveBand min;
  CurveBand max;
};

/// Aggregates per-trace curves of a single event over the window sizes shared
/// by all of them. Needs at least two traces.
[[nodiscard]] EventModel aggregate(std::span<const CurvePair> curves, double confidence);

struct MannWhitney {
  double u;  ///< U statistic of the first sample
  double p;  ///< two-sided p-value
};

/// Samples with |a|*|b| <= this use the exact permutation distribution.
inline constexpr std::size_t kMannWhitneyExactLimit = 400;

/// Two-sided Mann-Whitney U test with midranks for ties.
[[nodiscard]] MannWhitney mann_whitney_u(std::span<const double> a, std::span<const double> b);

struct IacConfig {
  std::size_t w_delta = 25;
  double confidence = 0.95;
  double alpha = 0.05;
  double sigma_th = 0.05;
};

/// Trained inter-arrival-curve model: six curves per feature event.
class IacModel {
 public:
  IacModel() = default;
  IacModel(IacConfig config, std::vector<Symbol> alphabet, std::vector<Symbol> feature_events,
           std::map<Symbol, EventModel> events);

  [[nodiscard]] const IacConfig& config() const noexcept { return config_; }
  [[nodiscard]] const std::vector<Symbol>& alphabet() const noexcept { return alphabet_; }
  [[nodiscard]] const std::vector<Symbol>& feature_events() const noexcept { return feature_events_; }
  [[nodiscard]] const std::map<Symbol, EventModel>& events() const noexcept { return events_; }
  [[nodiscard]] bool knows(std::string_view e) const noexcept;

  /// Same model restricted to `events` (each must be modelled).
  [[nodiscard]] IacModel with_feature_events(std::vector<Symbol> events) const;

  [[nodiscard]] nlohmann::ordered_json to_json() const;
  static IacModel from_json(const nlohmann::ordered_json& j);

 private:
  IacConfig config_;
  std::vector<Symbol> alphabet_;
  std::vector<Symbol> feature_events_;
  std::map<Symbol, EventModel> events_;
};

/// Trains on `traces` for the given feature events. Each feature event must
/// occur in at least two traces.
[[nodiscard]] IacModel train_iac(std::span<const EventTrace> traces, std::vector<Symbol> feature_events,
                                 const IacConfig& config = {});
/// Feature events chosen by select_feature_events at `significance_pct`.
[[nodiscard]] IacModel train_iac(std::span<const EventTrace> traces, double significance_pct,
                                 const IacConfig& config = {});

struct EventVerdict {
  Symbol event;
  bool passed_min = true;
  bool passed_max = true;
  double deviation_min = 0.0;
  double deviation_max = 0.0;
  bool unknown = false;  ///< absent from the model or from the test trace
  bool anomalous = false;
};

struct TraceVerdict {
  std::vector<EventVerdict> events;
  std::size_t anomalous_events = 0;
  bool anomalous = false;
};

/// Tests every feature event of `model` (plus any test event the model has
/// never seen) and combines per-event verdicts according to `sensitivity`.
[[nodiscard]] TraceVerdict classify_trace(const EventTrace& test, const IacModel& model, double alpha,
                                          double sigma_th, SensitivityDegree sensitivity);
/// Uses alpha and sigma_th from the model config.
[[nodiscard]] TraceVerdict classify_trace(const EventTrace& test, const IacModel& model,
                                          SensitivityDegree sensitivity);

}  // namespace icn
