#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "icn/iac.hpp"

namespace icn {

namespace {

CurveBand band_of(const std::vector<const IacCurve*>& curves, std::size_t len, double t_crit) {
  const double n = static_cast<double>(curves.size());
  CurveBand band;
  band.mean.reserve(len);
  band.lower.reserve(len);
  band.upper.reserve(len);
  for (std::size_t w = 0; w < len; ++w) {
    double sum = 0.0;
    for (const auto* c : curves) sum += c->values[w];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto* c : curves) ss += (c->values[w] - mean) * (c->values[w] - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double half = t_crit * sd / std::sqrt(n);
    band.mean.push_back(mean);
    band.lower.push_back(mean - half);
    band.upper.push_back(mean + half);
  }
  return band;
}

/// Mean normalised distance of `test` outside [lower, upper] over the first
/// `len` window sizes; zero when the test curve stays inside the band.
double band_deviation(const std::vector<double>& test, const CurveBand& band, std::size_t len) {
  double total = 0.0;
  for (std::size_t w = 0; w < len; ++w) {
    const double outside = std::max({0.0, test[w] - band.upper[w], band.lower[w] - test[w]});
    total += outside / std::max(band.mean[w], 1.0);
  }
  return total / static_cast<double>(len);
}

struct CurveCheck {
  bool passed;
  double deviation;
};

CurveCheck check_curve(const std::vector<double>& test, const CurveBand& band, double alpha) {
  const std::size_t len = std::min(test.size(), band.size());
  const std::span<const double> a(test.data(), len);
  const std::span<const double> b(band.mean.data(), len);
  const auto mw = mann_whitney_u(a, b);
  return {!(mw.p < alpha), band_deviation(test, band, len)};
}

}  // namespace

EventModel aggregate(std::span<const CurvePair> curves, double confidence) {
  if (curves.size() < 2) throw InsufficientDataError("aggregation needs curves from at least two traces");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ArgumentError("confidence must lie in (0, 1)");
  std::size_t len = curves.front().min.values.size();
  std::vector<const IacCurve*> mins;
  std::vector<const IacCurve*> maxs;
  for (const auto& c : curves) {
    len = std::min({len, c.min.values.size(), c.max.values.size()});
    mins.push_back(&c.min);
    maxs.push_back(&c.max);
  }
  const boost::math::students_t dist(static_cast<double>(curves.size() - 1));
  const double t_crit = boost::math::quantile(dist, 0.5 + confidence / 2.0);
  return {band_of(mins, len, t_crit), band_of(maxs, len, t_crit)};
}

// ---------------------------------------------------------------------------

IacModel::IacModel(IacConfig config, std::vector<Symbol> alphabet, std::vector<Symbol> feature_events,
                   std::map<Symbol, EventModel> events)
    : config_(config),
      alphabet_(std::move(alphabet)),
      feature_events_(std::move(feature_events)),
      events_(std::move(events)) {
  std::sort(alphabet_.begin(), alphabet_.end());
  for (const auto& e : feature_events_)
    if (!events_.contains(e)) throw ArgumentError("feature event '" + e + "' has no curves in the model");
}

bool IacModel::knows(std::string_view e) const noexcept {
  return std::binary_search(alphabet_.begin(), alphabet_.end(), e);
}

IacModel IacModel::with_feature_events(std::vector<Symbol> events) const {
  return IacModel(config_, alphabet_, std::move(events), events_);
}

nlohmann::ordered_json IacModel::to_json() const {
  nlohmann::ordered_json ev = nlohmann::ordered_json::object();
  for (const auto& [sym, m] : events_) {
    nlohmann::ordered_json curves = nlohmann::ordered_json::object();
    for (std::size_t w = 0; w < m.min.size(); ++w) {
      curves[std::to_string(w + 1)] = {m.min.mean[w], m.min.lower[w], m.min.upper[w],
                                       m.max.mean[w], m.max.lower[w], m.max.upper[w]};
    }
    ev[sym] = std::move(curves);
  }
  return {{"events", std::move(ev)},
          {"feature_events", feature_events_},
          {"alphabet", alphabet_},
          {"w_delta", config_.w_delta},
          {"confidence", config_.confidence},
          {"alpha", config_.alpha},
          {"sigma_th", config_.sigma_th}};
}

IacModel IacModel::from_json(const nlohmann::ordered_json& j) {
  try {
    IacConfig cfg;
    cfg.w_delta = j.at("w_delta").get<std::size_t>();
    cfg.confidence = j.at("confidence").get<double>();
    cfg.alpha = j.at("alpha").get<double>();
    cfg.sigma_th = j.at("sigma_th").get<double>();
    std::map<Symbol, EventModel> events;
    for (const auto& [sym, curves] : j.at("events").items()) {
      EventModel m;
      for (std::size_t w = 1; curves.contains(std::to_string(w)); ++w) {
        const auto& v = curves.at(std::to_string(w));
        if (v.size() != 6) throw SchemaError("curve entry must hold six values");
        m.min.mean.push_back(v[0].get<double>());
        m.min.lower.push_back(v[1].get<double>());
        m.min.upper.push_back(v[2].get<double>());
        m.max.mean.push_back(v[3].get<double>());
        m.max.lower.push_back(v[4].get<double>());
        m.max.upper.push_back(v[5].get<double>());
      }
      events.emplace(sym, std::move(m));
    }
    return IacModel(cfg, j.at("alphabet").get<std::vector<Symbol>>(), j.at("feature_events").get<std::vector<Symbol>>(),
                    std::move(events));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed IAC model: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

IacModel train_iac(std::span<const EventTrace> traces, std::vector<Symbol> feature_events, const IacConfig& config) {
  if (traces.empty()) throw InsufficientDataError("IAC training needs traces");
  std::vector<Symbol> alphabet;
  for (const auto& t : traces) alphabet.insert(alphabet.end(), t.alphabet().begin(), t.alphabet().end());
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());

  std::map<Symbol, EventModel> events;
  for (const auto& e : feature_events) {
    std::vector<CurvePair> pairs;
    for (const auto& t : traces)
      if (t.contains(e)) pairs.push_back(min_max_curves(t, e, config.w_delta));
    if (pairs.size() < 2)
      throw InsufficientDataError("event '" + e + "' occurs in fewer than two training traces");
    events.emplace(e, aggregate(pairs, config.confidence));
  }
  return IacModel(config, std::move(alphabet), std::move(feature_events), std::move(events));
}

IacModel train_iac(std::span<const EventTrace> traces, double significance_pct, const IacConfig& config) {
  return train_iac(traces, select_feature_events(traces, significance_pct), config);
}

TraceVerdict classify_trace(const EventTrace& test, const IacModel& model, double alpha, double sigma_th,
                            SensitivityDegree sensitivity) {
  if (test.empty()) throw ArgumentError("cannot classify an empty event trace");
  if (!(sigma_th >= 0.0)) throw ArgumentError("deviation threshold must be >= 0");
  TraceVerdict out;
  // Unknown behaviour counts as an unbounded deviation; only an infinite
  // deviation threshold lets it through.
  constexpr double kUnbounded = std::numeric_limits<double>::infinity();
  const bool unknown_alarms = std::isfinite(sigma_th);

  for (const auto& e : model.feature_events()) {
    EventVerdict v;
    v.event = e;
    if (!test.contains(e)) {
      v.unknown = true;
      v.passed_min = v.passed_max = false;
      v.deviation_min = v.deviation_max = kUnbounded;
      v.anomalous = unknown_alarms;
    } else {
      const auto& em = model.events().at(e);
      const auto curves = min_max_curves(test, e, model.config().w_delta);
      const auto cmin = check_curve(curves.min.values, em.min, alpha);
      const auto cmax = check_curve(curves.max.values, em.max, alpha);
      v.passed_min = cmin.passed;
      v.passed_max = cmax.passed;
      v.deviation_min = cmin.deviation;
      v.deviation_max = cmax.deviation;
      const bool min_bad = !cmin.passed && cmin.deviation >= sigma_th;
      const bool max_bad = !cmax.passed && cmax.deviation >= sigma_th;
      v.anomalous = min_bad || max_bad;
    }
    out.events.push_back(std::move(v));
  }
  for (const auto& e : test.alphabet()) {
    if (model.knows(e) || !test.contains(e)) continue;
    EventVerdict v;
    v.event = e;
    v.unknown = true;
    v.passed_min = v.passed_max = false;
    v.deviation_min = v.deviation_max = kUnbounded;
    v.anomalous = unknown_alarms;
    out.events.push_back(std::move(v));
  }

  out.anomalous_events = static_cast<std::size_t>(
      std::count_if(out.events.begin(), out.events.end(), [](const EventVerdict& v) { return v.anomalous; }));
  if (!out.events.empty()) out.anomalous = out.anomalous_events >= sensitivity.required_count(out.events.size());
  return out;
}

TraceVerdict classify_trace(const EventTrace& test, const IacModel& model, SensitivityDegree sensitivity) {
  return classify_trace(test, model, model.config().alpha, model.config().sigma_th, sensitivity);
}

}  // namespace icn
