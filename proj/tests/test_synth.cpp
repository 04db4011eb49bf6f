#include <doctest.h>

#include <cmath>
#include <sstream>

#include "icn/synth.hpp"

using namespace icn;

namespace {

std::size_t anomalous_rows(const DataTrace& t) {
  std::size_t n = 0;
  for (const auto& r : t.rows()) n += r.label == Label::Anomalous ? 1 : 0;
  return n;
}

std::string dump(const DataTrace& t) {
  std::ostringstream out;
  write_data_trace(out, t);
  return out.str();
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("defaults are calibrated to the published thresholds") {
    const auto config = GeneratorConfig::defaults();
    const double expected[] = {445, 18.75, 2.50, 532, 1032};
    REQUIRE(config.signals.size() == 5);
    CHECK(config.signal_names() == std::vector<std::string>{"FGF", "MSV", "GBV", "EGT", "Power"});
    CHECK(config.schema().size() == 18);
    for (std::size_t i = 0; i < 5; ++i) {
      const auto& p = config.signals[i];
      CHECK(std::abs(compute_threshold(p.psi, p.target_mu).p_th - expected[i]) <= 0.5);
    }
    CHECK_NOTHROW(config.validate());
  }

  TEST_CASE("config validation and JSON") {
    auto config = GeneratorConfig::defaults();
    const auto back = GeneratorConfig::from_json(config.to_json());
    CHECK(back.to_json() == config.to_json());
    CHECK(config_hash(back) == config_hash(config));
    config.signals[0].target_mu = 600;  // beyond the operational limit
    CHECK_THROWS_AS(config.validate(), ConfigError);
    CHECK_THROWS_AS(GeneratorConfig::from_json(nlohmann::ordered_json{{"rows_per_group", "many"}}), ConfigError);
    auto other = GeneratorConfig::defaults();
    other.seed = 43;
    CHECK(config_hash(other) != config_hash(GeneratorConfig::defaults()));
  }

  TEST_CASE("gen_normal") {
    auto config = GeneratorConfig::defaults();
    SUBCASE("zero variance reproduces the target means") {
      for (auto& p : config.signals) p.rel_std = 0;
      for (auto& p : config.fillers) p.rel_std = 0;
      for (Group g : kAllGroups) {
        const auto t = gen_normal(config, g, 20);
        for (const auto& row : t.data.rows()) {
          for (std::size_t i = 0; i < config.signals.size(); ++i)
            CHECK(row.values[i] == config.group_mu(config.signals[i], g));
          CHECK(row.label == Label::Normal);
        }
      }
    }
    SUBCASE("empty request") {
      const auto t = gen_normal(config, Group::AD, 0);
      CHECK(t.data.empty());
      CHECK(t.events.size() == 0);
    }
    SUBCASE("deterministic, timestamps in the group bucket, events aligned") {
      const auto a = gen_normal(config, Group::ED, 50);
      const auto b = gen_normal(config, Group::ED, 50);
      CHECK(dump(a.data) == dump(b.data));
      REQUIRE(a.events.size() == 50);
      for (std::size_t i = 0; i < 50; ++i) {
        CHECK(a.data[i].group == Group::ED);
        CHECK(group_from_timestamp(a.data[i].timestamp) == Group::ED);
        CHECK(a.events.timestamps[i] == a.data[i].timestamp);
        CHECK(a.events.slices[i].events() == row_schedule(config).events());
      }
    }
  }

  TEST_CASE("row schedule") {
    const auto config = GeneratorConfig::defaults();
    const auto plain = row_schedule(config);
    for (const auto& s : config.signal_names()) CHECK(plain.count(s) == config.cadence);
    const auto burst = row_schedule(config, {"FGF", "EGT"}, 1);
    CHECK(burst.count("FGF") == config.cadence + config.burst_extra);
    CHECK(burst.count("EGT") == config.cadence + config.burst_extra);
    CHECK(burst.count("MSV") == config.cadence);
    CHECK(burst.size() == plain.size() + 2 * config.burst_extra);
  }

  TEST_CASE("attack patterns hit the expected parameter counts") {
    const auto config = GeneratorConfig::defaults();
    const auto campaign = gen_campaign(config);
    const auto& gc = campaign.group(Group::MD);
    const auto signals = config.signal_names();
    const std::pair<AttackPattern, std::size_t> cases[] = {
        {AttackPattern::One, 1}, {AttackPattern::Three, 3}, {AttackPattern::Five, 5}};
    for (const auto& [pattern, expected] : cases) {
      const auto& base = gc.scenario(20).test;
      DataTrace normal(base.schema());
      for (const auto& r : base.rows())
        if (r.label == Label::Normal) normal.push_back(r);
      RowEvents events;
      for (const auto& r : normal.rows()) {
        events.timestamps.push_back(r.timestamp);
        events.slices.push_back(row_schedule(config));
      }
      const auto attacked = inject_attacks(normal, gc.profile, signals, {pattern, 0.25, 5, 3}, &events);
      CHECK(anomalous_rows(attacked) == static_cast<std::size_t>(std::lround(0.25 * normal.size())));
      for (std::size_t i = 0; i < attacked.size(); ++i) {
        const auto& row = attacked[i];
        const auto hits = count_compromised(row, attacked.schema(), gc.profile, signals);
        if (row.label == Label::Anomalous) {
          CHECK(hits == expected);
          CHECK(events.slices[i].size() == row_schedule(config).size() + expected * 3);
          for (std::size_t j = 0; j < signals.size(); ++j) {
            const double v = row.values[j];
            const auto& p = gc.profile.at(signals[j]).spec;
            CHECK(v <= p.psi);
          }
        } else {
          CHECK(hits == 0);
          CHECK(events.slices[i].size() == row_schedule(config).size());
        }
      }
    }
    DataTrace empty_normal(gc.history.schema());
    CHECK_THROWS(inject_attacks(empty_normal, gc.profile, signals, {AttackPattern::One, 0.25, 1, 3}));
    const std::vector<std::string> bogus{"NOPE"};
    CHECK_THROWS_AS(inject_attacks(gc.history, gc.profile, bogus, {AttackPattern::One, 0.25, 1, 3}), SchemaError);
  }

  TEST_CASE("default campaign shape") {
    const auto config = GeneratorConfig::defaults();
    const auto campaign = gen_campaign(config);
    REQUIRE(campaign.groups.size() == 4);
    for (const auto& gc : campaign.groups) {
      CHECK(gc.history.size() == config.history_rows);
      for (std::size_t i = 0; i < gc.history.size(); ++i)
        CHECK(count_compromised(gc.history[i], gc.history.schema(), gc.profile, config.schema()) == 0);
      for (int pct : kSensitivityLevels) {
        const auto& sc = gc.scenario(pct);
        CHECK(sc.pattern == pattern_for_sensitivity(pct));
        CHECK(sc.test.size() == 180);
        CHECK(anomalous_rows(sc.test) == 45);
        CHECK(sc.train.size() == 60);
        CHECK(anomalous_rows(sc.train) == 15);
        CHECK(sc.test_events.size() == sc.test.size());
        CHECK(sc.train_events.size() == sc.train.size());
      }
    }
  }

  TEST_CASE("regeneration is bit identical and seeds change values, not shapes") {
    auto config = GeneratorConfig::defaults();
    const auto a = gen_campaign(config);
    const auto b = gen_campaign(config);
    config.seed = 7;
    const auto c = gen_campaign(config);
    for (std::size_t g = 0; g < 4; ++g) {
      CHECK(dump(a.groups[g].scenario(60).test) == dump(b.groups[g].scenario(60).test));
      CHECK(dump(a.groups[g].scenario(60).test) != dump(c.groups[g].scenario(60).test));
      CHECK(c.groups[g].scenario(60).test.size() == 180);
      CHECK(anomalous_rows(c.groups[g].scenario(60).test) == 45);
    }
  }

  TEST_CASE("group Power means follow the demand offsets") {
    const auto config = GeneratorConfig::defaults();
    const auto campaign = gen_campaign(config);
    std::map<Group, std::pair<double, double>> stats;  // mean, standard error
    for (const auto& gc : campaign.groups) {
      const auto col = gc.history.column("Power");
      double mean = 0;
      for (double v : col) mean += v;
      mean /= static_cast<double>(col.size());
      double var = 0;
      for (double v : col) var += (v - mean) * (v - mean);
      var /= static_cast<double>(col.size() - 1);
      stats[gc.group] = {mean, std::sqrt(var / static_cast<double>(col.size()))};
    }
    for (Group g : kAllGroups) {
      const double target = config.group_mu(config.signals[4], g);
      CHECK(std::abs(stats[g].first - target) <= 3 * stats[g].second + 0.02 * target);
    }
    // ND (0.94) < MD (1.00) < AD (1.06) < ED (1.12)
    CHECK(stats[Group::ND].first < stats[Group::MD].first);
    CHECK(stats[Group::MD].first < stats[Group::AD].first);
    CHECK(stats[Group::AD].first < stats[Group::ED].first);
  }

  TEST_CASE("pattern names") {
    CHECK(parse_attack_pattern("three") == AttackPattern::Three);
    CHECK(to_string(AttackPattern::Mixed) == "mixed");
    CHECK_THROWS_AS(parse_attack_pattern("two"), ConfigError);
    CHECK(pattern_for_sensitivity(20) == AttackPattern::Five);
    CHECK(pattern_for_sensitivity(100) == AttackPattern::One);
  }
}
