#include "icn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

namespace icn {

namespace {

using ojson = nlohmann::ordered_json;

struct FillerSeed {
  const char* name;
  double psi;
  double mu;
};

// Invented limits; only their sub-threshold behaviour matters.
constexpr FillerSeed kFillers[] = {
    {"CDP", 20.0, 12.5}, {"LOT", 80.0, 52.0}, {"LOP", 6.0, 3.4},   {"BTT", 120.0, 78.0}, {"CIT", 60.0, 28.0},
    {"AMB", 50.0, 24.0}, {"HUM", 100.0, 55.0}, {"GCV", 100.0, 62.0}, {"IGV", 90.0, 58.0},  {"FRQ", 60.0, 50.0},
    {"VLT", 16.0, 11.0}, {"CUR", 50.0, 32.0},  {"PF", 1.0, 0.85},
};

constexpr std::int64_t kBucketStartHour[] = {6, 12, 18, 0};  // MD, AD, ED, ND
constexpr std::size_t kRowsPerBucketDay = 6 * 60;

ParameterModel parameter_from(const ojson& j) {
  ParameterModel p;
  p.name = j.at("name").get<std::string>();
  p.psi = j.at("psi").get<double>();
  p.target_mu = j.at("target_mu").get<double>();
  p.rel_std = j.value("rel_std", 0.05);
  return p;
}

ojson parameter_json(const ParameterModel& p) {
  return {{"name", p.name}, {"psi", p.psi}, {"target_mu", p.target_mu}, {"rel_std", p.rel_std}};
}

std::int64_t row_timestamp(const GeneratorConfig& c, Group g, std::size_t row) {
  const auto day = static_cast<std::int64_t>(row / kRowsPerBucketDay);
  const auto minute = static_cast<std::int64_t>(row % kRowsPerBucketDay);
  return c.start_ts + day * 86400 + kBucketStartHour[group_index(g)] * 3600 + minute * c.step_seconds;
}

double draw_truncated(Rng& rng, double mu, double sd, double cap) {
  if (sd <= 0.0) return mu;
  std::normal_distribution<double> dist(mu, sd);
  for (int tries = 0; tries < 10000; ++tries) {
    const double v = dist(rng);
    if (v > 0.0 && v <= cap) return v;
  }
  throw ConfigError("cannot draw a sub-threshold value (mean " + format_double(mu) + ", cap " + format_double(cap) +
                    ")");
}

}  // namespace

std::string_view to_string(AttackPattern p) noexcept {
  switch (p) {
    case AttackPattern::One: return "one";
    case AttackPattern::Three: return "three";
    case AttackPattern::Five: return "five";
    case AttackPattern::Mixed: return "mixed";
  }
  return "?";
}

AttackPattern parse_attack_pattern(std::string_view s) {
  if (s == "one") return AttackPattern::One;
  if (s == "three") return AttackPattern::Three;
  if (s == "five") return AttackPattern::Five;
  if (s == "mixed") return AttackPattern::Mixed;
  throw ConfigError("unknown attack pattern '" + std::string(s) + "'");
}

AttackPattern pattern_for_sensitivity(int pct) {
  switch (SensitivityDegree::from_pct(pct).pct()) {
    case 20: return AttackPattern::Five;
    case 60: return AttackPattern::Three;
    default: return AttackPattern::One;
  }
}

GeneratorConfig GeneratorConfig::defaults(std::size_t extra_params) {
  GeneratorConfig c;
  c.signals = {{"FGF", 500.0, 334.17, 0.05},
               {"MSV", 45.0, 10.63, 0.05},
               {"GBV", 5.0, 1.4645, 0.05},
               {"EGT", 560.0, 434.8, 0.05},
               {"Power", 1120.0, 806.06, 0.05}};
  for (std::size_t i = 0; i < extra_params; ++i) {
    if (i < std::size(kFillers)) {
      c.fillers.push_back({kFillers[i].name, kFillers[i].psi, kFillers[i].mu, 0.05});
    } else {
      c.fillers.push_back({(i < 10 ? "AUX0" : "AUX") + std::to_string(i), 100.0, 50.0, 0.05});
    }
  }
  c.power_offset = {{Group::MD, 1.00}, {Group::AD, 1.06}, {Group::ED, 1.12}, {Group::ND, 0.94}};
  return c;
}

GeneratorConfig GeneratorConfig::from_json(const ojson& j) {
  try {
    const std::size_t extra = j.value("extra_params", std::size_t{13});
    GeneratorConfig c = defaults(extra);
    if (j.contains("signals")) {
      c.signals.clear();
      for (const auto& p : j.at("signals")) c.signals.push_back(parameter_from(p));
    }
    if (j.contains("fillers")) {
      c.fillers.clear();
      for (const auto& p : j.at("fillers")) c.fillers.push_back(parameter_from(p));
    }
    if (j.contains("power_offset"))
      for (const auto& [tag, v] : j.at("power_offset").items()) c.power_offset[parse_group(tag)] = v.get<double>();
    c.history_rows = j.value("history_rows", c.history_rows);
    c.rows_per_group = j.value("rows_per_group", c.rows_per_group);
    c.train_fraction = j.value("train_fraction", c.train_fraction);
    c.attack_rate = j.value("attack_rate", c.attack_rate);
    if (j.contains("attack_pattern") && !j.at("attack_pattern").is_null())
      c.attack_pattern = parse_attack_pattern(j.at("attack_pattern").get<std::string>());
    c.trim_fraction = j.value("trim_fraction", c.trim_fraction);
    c.window_len = j.value("window_len", c.window_len);
    c.cadence = j.value("cadence", c.cadence);
    c.burst_extra = j.value("burst_extra", c.burst_extra);
    c.start_ts = j.value("start_ts", c.start_ts);
    c.step_seconds = j.value("step_seconds", c.step_seconds);
    c.seed = j.value("seed", c.seed);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed generator config: ") + e.what());
  } catch (const SchemaError& e) {
    throw ConfigError(e.what());
  }
}

ojson GeneratorConfig::to_json() const {
  ojson sig = ojson::array(), fill = ojson::array(), off = ojson::object();
  for (const auto& p : signals) sig.push_back(parameter_json(p));
  for (const auto& p : fillers) fill.push_back(parameter_json(p));
  for (Group g : kAllGroups)
    if (auto it = power_offset.find(g); it != power_offset.end()) off[std::string(to_string(g))] = it->second;
  ojson j{{"signals", sig},
          {"fillers", fill},
          {"power_offset", off},
          {"history_rows", history_rows},
          {"rows_per_group", rows_per_group},
          {"train_fraction", train_fraction},
          {"attack_rate", attack_rate},
          {"attack_pattern", attack_pattern ? ojson(std::string(to_string(*attack_pattern))) : ojson(nullptr)},
          {"trim_fraction", trim_fraction},
          {"window_len", window_len},
          {"cadence", cadence},
          {"burst_extra", burst_extra},
          {"start_ts", start_ts},
          {"step_seconds", step_seconds},
          {"seed", seed}};
  return j;
}

void GeneratorConfig::validate() const {
  if (signals.empty()) throw ConfigError("generator needs at least one signal parameter");
  std::set<std::string> names;
  auto check = [&](const ParameterModel& p, double mu) {
    if (!names.insert(p.name).second) throw ConfigError("duplicate parameter '" + p.name + "'");
    if (!(p.psi > 0.0)) throw ConfigError("parameter '" + p.name + "': psi must be > 0");
    if (!(p.rel_std >= 0.0)) throw ConfigError("parameter '" + p.name + "': rel_std must be >= 0");
    if (!(mu > 0.0)) throw ConfigError("parameter '" + p.name + "': target_mu must be > 0");
    const auto th = compute_threshold(p.psi, mu);
    if (!(mu < th.p_th))
      throw ConfigError("parameter '" + p.name + "': target_mu " + format_double(mu) + " is not below its threshold " +
                        format_double(th.p_th));
    if (!(th.p_th < p.psi)) throw ConfigError("parameter '" + p.name + "': threshold leaves no attack band below psi");
  };
  for (Group g : kAllGroups) {
    names.clear();
    for (const auto& p : signals) check(p, group_mu(p, g));
    for (const auto& p : fillers) check(p, group_mu(p, g));
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0, 1)");
  if (!(attack_rate > 0.0 && attack_rate < 1.0)) throw ConfigError("attack_rate must lie in (0, 1)");
  if (!(trim_fraction >= 0.0 && trim_fraction < 0.5)) throw ConfigError("trim_fraction must lie in [0, 0.5)");
  if (window_len == 0) throw ConfigError("window_len must be >= 1");
  if (history_rows == 0) throw ConfigError("history_rows must be >= 1");
  if (cadence == 0) throw ConfigError("cadence must be >= 1");
  if (step_seconds <= 0 || static_cast<std::size_t>(step_seconds) * kRowsPerBucketDay > 6 * 3600)
    throw ConfigError("step_seconds must keep a day's rows inside the 6 h group bucket");
  for (const auto& [g, v] : power_offset)
    if (!(v > 0.0)) throw ConfigError("power offsets must be > 0");
}

std::vector<std::string> GeneratorConfig::schema() const {
  std::vector<std::string> out = signal_names();
  for (const auto& p : fillers) out.push_back(p.name);
  return out;
}

std::vector<std::string> GeneratorConfig::signal_names() const {
  std::vector<std::string> out;
  for (const auto& p : signals) out.push_back(p.name);
  return out;
}

std::map<std::string, double> GeneratorConfig::limits() const {
  std::map<std::string, double> out;
  for (const auto& p : signals) out[p.name] = p.psi;
  for (const auto& p : fillers) out[p.name] = p.psi;
  return out;
}

double GeneratorConfig::group_mu(const ParameterModel& p, Group group) const {
  if (p.name != "Power") return p.target_mu;
  auto it = power_offset.find(group);
  return p.target_mu * (it == power_offset.end() ? 1.0 : it->second);
}

std::string config_hash(const GeneratorConfig& config) { return fnv1a_hex(config.to_json().dump()); }

EventTrace row_schedule(const GeneratorConfig& config, const std::vector<std::string>& burst, std::size_t burst_scan) {
  // Signal parameters are polled every scan, fillers on alternate scans.
  std::vector<Symbol> events;
  for (std::size_t scan = 0; scan < config.cadence; ++scan) {
    for (const auto& p : config.signals) {
      events.push_back(p.name);
      if (scan == burst_scan && std::find(burst.begin(), burst.end(), p.name) != burst.end())
        events.insert(events.end(), config.burst_extra, p.name);
    }
    for (std::size_t i = scan % 2; i < config.fillers.size(); i += 2) events.push_back(config.fillers[i].name);
  }
  return EventTrace(std::move(events));
}

GeneratedTrace gen_normal(const GeneratorConfig& config, Group group, std::size_t n, Rng& rng, std::size_t first_row,
                          const ThresholdProfile* cap_profile) {
  config.validate();
  GeneratedTrace out{DataTrace(config.schema()), {}};
  std::vector<ParameterModel> params = config.signals;
  params.insert(params.end(), config.fillers.begin(), config.fillers.end());
  std::vector<double> mu, sd, cap;
  for (const auto& p : params) {
    const double m = config.group_mu(p, group);
    mu.push_back(m);
    sd.push_back(p.rel_std * m);
    cap.push_back(cap_profile && cap_profile->has(p.name) ? cap_profile->threshold(p.name)
                                                          : compute_threshold(p.psi, m).p_th);
  }
  const EventTrace schedule = row_schedule(config);
  for (std::size_t r = 0; r < n; ++r) {
    DataRow row;
    row.timestamp = row_timestamp(config, group, first_row + r);
    row.group = group;
    row.label = Label::Normal;
    row.values.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) row.values.push_back(draw_truncated(rng, mu[i], sd[i], cap[i]));
    out.events.timestamps.push_back(row.timestamp);
    out.events.slices.push_back(schedule);
    out.data.push_back(std::move(row));
  }
  return out;
}

GeneratedTrace gen_normal(const GeneratorConfig& config, Group group, std::size_t n) {
  Rng rng(derive_seed(config.seed, group_index(group) + 1));
  return gen_normal(config, group, n, rng);
}

DataTrace inject_attacks(const DataTrace& trace, const ThresholdProfile& profile,
                         const std::vector<std::string>& signals, const AttackOptions& options, RowEvents* events) {
  if (!(options.rate > 0.0 && options.rate <= 1.0)) throw ArgumentError("attack rate must lie in (0, 1]");
  const auto k = static_cast<std::size_t>(std::llround(options.rate * static_cast<double>(trace.size())));
  if (k == 0) throw ArgumentError("attack rate selects no rows");
  if (events && events->size() != trace.size()) throw ArgumentError("event slices do not align with data rows");
  for (const auto& r : trace.rows())
    if (r.label && *r.label != Label::Normal) throw ArgumentError("attacks are injected into normal rows only");

  const std::size_t needed = options.pattern == AttackPattern::One ? 1 : options.pattern == AttackPattern::Three ? 3 : 5;
  if (options.pattern != AttackPattern::One && signals.size() < (options.pattern == AttackPattern::Three ? 3u : 5u))
    throw SchemaError("attack pattern '" + std::string(to_string(options.pattern)) + "' needs " +
                      std::to_string(needed) + " signal parameters");
  std::vector<std::size_t> column;
  for (const auto& s : signals) {
    if (!profile.has(s)) throw SchemaError("attack parameter '" + s + "' missing from profile");
    column.push_back(trace.index_of(s));
    const auto& spec = profile.at(s).spec;
    if (!(spec.p_th < spec.psi)) throw ConfigError("parameter '" + s + "' has no band above its threshold");
  }

  Rng rng(options.seed);
  std::vector<std::size_t> order(trace.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(k);
  std::sort(order.begin(), order.end());

  DataTrace out = trace;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> which(0, 2);
  for (std::size_t r : order) {
    AttackPattern pattern = options.pattern;
    if (pattern == AttackPattern::Mixed) {
      constexpr AttackPattern kChoices[] = {AttackPattern::One, AttackPattern::Three, AttackPattern::Five};
      pattern = kChoices[which(rng)];
    }
    const std::size_t count = pattern == AttackPattern::One ? 1 : pattern == AttackPattern::Three ? 3 : signals.size();
    std::vector<std::size_t> pick(signals.size());
    std::iota(pick.begin(), pick.end(), 0);
    std::shuffle(pick.begin(), pick.end(), rng);
    pick.resize(count);
    std::sort(pick.begin(), pick.end());

    auto& row = out.mutable_rows()[r];
    std::vector<std::string> burst;
    for (std::size_t s : pick) {
      const auto& spec = profile.at(signals[s]).spec;
      // uniform on (p_th, psi]
      row.values[column[s]] = spec.psi - unit(rng) * (spec.psi - spec.p_th);
      burst.push_back(signals[s]);
    }
    row.label = Label::Anomalous;

    if (events) {
      auto& slice = events->slices[r];
      std::vector<Symbol> ev = slice.events();
      for (const auto& name : burst) {
        const std::size_t occurrences = slice.count(name);
        if (occurrences == 0) continue;
        const std::size_t at = std::uniform_int_distribution<std::size_t>(0, occurrences - 1)(rng);
        std::size_t seen = 0;
        for (std::size_t i = 0; i < ev.size(); ++i)
          if (ev[i] == name && seen++ == at) {
            ev.insert(ev.begin() + static_cast<std::ptrdiff_t>(i) + 1, options.burst_extra, name);
            break;
          }
      }
      slice = EventTrace(std::move(ev), slice.alphabet());
    }
  }
  return out;
}

const ScenarioData& GroupCampaign::scenario(int s_pct) const {
  for (const auto& s : scenarios)
    if (s.s_pct == s_pct) return s;
  throw ArgumentError("no scenario for sensitivity " + std::to_string(s_pct) + "%");
}

const GroupCampaign& Campaign::group(Group g) const {
  for (const auto& gc : groups)
    if (gc.group == g) return gc;
  throw ArgumentError("campaign has no group " + std::string(to_string(g)));
}

Campaign gen_campaign(const GeneratorConfig& config) {
  config.validate();
  Campaign campaign{config, {}};
  const auto signals = config.signal_names();
  for (Group g : kAllGroups) {
    const std::uint64_t gseed = derive_seed(config.seed, group_index(g) + 1);
    GroupCampaign gc;
    gc.group = g;

    Rng history_rng(derive_seed(gseed, 1));
    auto history = gen_normal(config, g, config.history_rows, history_rng);
    gc.profile = build_profile(history.data, config.limits(), config.trim_fraction, config.window_len);

    Rng eval_rng(derive_seed(gseed, 2));
    auto eval = gen_normal(config, g, config.rows_per_group, eval_rng, config.history_rows, &gc.profile);
    gc.history = std::move(history.data);
    gc.history_events = std::move(history.events);

    // Split row positions so data and event slices stay paired.
    std::vector<std::size_t> all(eval.data.size());
    std::iota(all.begin(), all.end(), 0);
    std::vector<std::size_t> train_idx = all;
    Rng split_rng(derive_seed(gseed, 3));
    std::shuffle(train_idx.begin(), train_idx.end(), split_rng);
    train_idx.resize(static_cast<std::size_t>(
        std::llround(config.train_fraction * static_cast<double>(eval.data.size()))));
    std::sort(train_idx.begin(), train_idx.end());
    std::vector<std::size_t> test_idx;
    std::set_difference(all.begin(), all.end(), train_idx.begin(), train_idx.end(), std::back_inserter(test_idx));

    for (int pct : kSensitivityLevels) {
      ScenarioData sd;
      sd.s_pct = pct;
      sd.pattern = config.attack_pattern.value_or(pattern_for_sensitivity(pct));
      auto build = [&](const std::vector<std::size_t>& idx, std::uint64_t stream, DataTrace& data, RowEvents& ev) {
        ev = eval.events.subset(idx);
        const DataTrace base = eval.data.subset(idx);
        if (base.empty()) {
          data = base;
          return;
        }
        AttackOptions opts{sd.pattern, config.attack_rate, derive_seed(gseed, stream), config.burst_extra};
        data = inject_attacks(base, gc.profile, signals, opts, &ev);
      };
      build(train_idx, 100 + static_cast<std::uint64_t>(pct), sd.train, sd.train_events);
      build(test_idx, 1000 + static_cast<std::uint64_t>(pct), sd.test, sd.test_events);
      gc.scenarios.push_back(std::move(sd));
    }
    campaign.groups.push_back(std::move(gc));
  }
  return campaign;
}

}  // namespace icn
