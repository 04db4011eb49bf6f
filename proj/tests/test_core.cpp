#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "icn/core.hpp"

using namespace icn;

namespace {

DataTrace parse_text(const std::string& text, const std::vector<std::string>* schema = nullptr) {
  std::istringstream in(text);
  return read_data_trace(in, schema);
}

DataTrace numbered_trace(std::size_t n) {
  DataTrace t({"x"});
  for (std::size_t i = 0; i < n; ++i)
    t.push_back(DataRow{static_cast<std::int64_t>(i), kAllGroups[i % 4], {static_cast<double>(i)}, std::nullopt});
  return t;
}

}  // namespace

TEST_SUITE("core") {
  TEST_CASE("groups follow six-hour UTC buckets") {
    CHECK(group_from_timestamp(0) == Group::ND);
    CHECK(group_from_timestamp(6 * 3600) == Group::MD);
    CHECK(group_from_timestamp(12 * 3600 - 1) == Group::MD);
    CHECK(group_from_timestamp(12 * 3600) == Group::AD);
    CHECK(group_from_timestamp(18 * 3600) == Group::ED);
    CHECK(group_from_timestamp(86400 + 5 * 3600) == Group::ND);
    CHECK(parse_group("ED") == Group::ED);
    CHECK_THROWS_WITH_AS(parse_group("XX"), doctest::Contains("XX"), SchemaError);
  }

  TEST_CASE("sensitivity required counts") {
    CHECK(SensitivityDegree::least().required_count(5) == 5);
    CHECK(SensitivityDegree::least().required_count(18) == 18);
    CHECK(SensitivityDegree::medium().required_count(5) == 3);
    CHECK(SensitivityDegree::medium().required_count(2) == 2);
    CHECK(SensitivityDegree::high().required_count(5) == 1);
    CHECK_THROWS_AS(SensitivityDegree::from_pct(50), ArgumentError);
    for (int pct : kSensitivityLevels)
      for (std::size_t n = 1; n < 20; ++n) {
        const auto r = SensitivityDegree::from_pct(pct).required_count(n);
        CHECK(r >= 1);
        CHECK(r <= n);
      }
  }

  TEST_CASE("parameter invariants") {
    CHECK_NOTHROW(ParameterSpec{"FGF", 500, 334.17, 445}.validate());
    CHECK_THROWS_AS((ParameterSpec{"FGF", 0, 1, 1}.validate()), ArgumentError);
    CHECK_THROWS_AS((ParameterSpec{"FGF", 500, 334, 300}.validate()), ArgumentError);
  }

  TEST_CASE("parse a normal operation row") {
    const auto t = parse_text("ts,group,FGF,MSV,GBV,EGT,Power\n0,MD,329,10.51,1.43,469,918\n");
    REQUIRE(t.size() == 1);
    CHECK(t.value(0, "FGF") == 329);
    CHECK(t.value(0, "MSV") == 10.51);
    CHECK(t[0].group == Group::MD);
    CHECK_FALSE(t[0].label.has_value());
    CHECK(t.schema() == std::vector<std::string>{"FGF", "MSV", "GBV", "EGT", "Power"});
  }

  TEST_CASE("empty body gives an empty trace") {
    const auto t = parse_text("ts,group,FGF\n");
    CHECK(t.empty());
  }

  TEST_CASE("bad cell reports its row") {
    try {
      (void)parse_text("ts,group,FGF\n0,MD,abc\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.row() == 1);
    }
  }

  TEST_CASE("missing column names the column") {
    const std::vector<std::string> schema{"FGF", "MSV"};
    CHECK_THROWS_WITH_AS(parse_text("ts,group,FGF\n0,MD,1\n", &schema), doctest::Contains("MSV"), SchemaError);
  }

  TEST_CASE("labels and derived groups") {
    const auto t = parse_text("# comment\nts,group,x,label\n21600,,1,+1\n0,ND,2,-1\n");
    REQUIRE(t.size() == 2);
    CHECK(t[0].group == Group::MD);
    CHECK(t[0].label == Label::Normal);
    CHECK(t[1].label == Label::Anomalous);
    CHECK_THROWS_AS(parse_text("ts,group,x,label\n0,ND,2,0\n"), ParseError);
    CHECK_THROWS_AS(parse_text("ts,group,x\n0,QQ,2\n"), SchemaError);
  }

  TEST_CASE("write then parse is bit exact") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long> digits(-99999999, 99999999);
    DataTrace t({"a", "b"});
    for (int i = 0; i < 200; ++i) {
      const double a = static_cast<double>(digits(rng)) / 1e6;
      const double b = static_cast<double>(digits(rng)) / 1e3;
      t.push_back(DataRow{i * 60, group_from_timestamp(i * 60), {a, b}, i % 3 ? Label::Normal : Label::Anomalous});
    }
    std::ostringstream out;
    const std::vector<std::string> comment{"seed 1"};
    write_data_trace(out, t, comment);
    const auto back = parse_text(out.str());
    REQUIRE(back.size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(back[i].values == t[i].values);
      CHECK(back[i].label == t[i].label);
      CHECK(back[i].timestamp == t[i].timestamp);
      CHECK(back[i].group == t[i].group);
    }
  }

  TEST_CASE("non-finite values are rejected") {
    DataTrace t({"a"});
    CHECK_THROWS(t.push_back(DataRow{0, Group::MD, {std::nan("")}, std::nullopt}));
    CHECK_THROWS(t.push_back(DataRow{0, Group::MD, {1.0, 2.0}, std::nullopt}));
  }

  TEST_CASE("split_by_group") {
    SUBCASE("one row per group") {
      const auto parts = split_by_group(numbered_trace(4));
      for (Group g : kAllGroups) CHECK(parts.at(g).size() == 1);
    }
    SUBCASE("all ND") {
      DataTrace t({"x"});
      for (int i = 0; i < 5; ++i) t.push_back(DataRow{i, Group::ND, {1.0 * i}, std::nullopt});
      const auto parts = split_by_group(t);
      CHECK(parts.at(Group::ND).size() == 5);
      CHECK(parts.at(Group::MD).empty());
      CHECK(parts.at(Group::AD).empty());
      CHECK(parts.at(Group::ED).empty());
    }
    SUBCASE("180 rows round-trip as a permutation") {
      const auto t = numbered_trace(180);
      const auto parts = split_by_group(t);
      std::multiset<double> seen;
      for (Group g : kAllGroups) {
        CHECK(parts.at(g).size() == 45);
        double last = -1;
        for (const auto& r : parts.at(g).rows()) {
          CHECK(r.values[0] > last);  // order preserved
          last = r.values[0];
          seen.insert(r.values[0]);
        }
      }
      std::multiset<double> all;
      for (const auto& r : t.rows()) all.insert(r.values[0]);
      CHECK(seen == all);
    }
  }

  TEST_CASE("train_test_split") {
    const auto t = numbered_trace(180);
    const auto s = train_test_split(t, 0.25, 9);
    CHECK(s.train.size() == 45);
    CHECK(s.test.size() == 135);
    std::set<double> a, b;
    for (const auto& r : s.train.rows()) a.insert(r.values[0]);
    for (const auto& r : s.test.rows()) b.insert(r.values[0]);
    std::vector<double> both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    CHECK(both.empty());
    CHECK(a.size() + b.size() == 180);

    const auto small1 = train_test_split(numbered_trace(4), 0.25, 3);
    const auto small2 = train_test_split(numbered_trace(4), 0.25, 3);
    CHECK(small1.train.rows()[0].values == small2.train.rows()[0].values);

    const auto base = train_test_split(numbered_trace(100), 0.25, 0);
    int differing = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto other = train_test_split(numbered_trace(100), 0.25, seed);
      for (std::size_t i = 0; i < 25; ++i)
        if (other.train.rows()[i].values != base.train.rows()[i].values) {
          ++differing;
          break;
        }
    }
    CHECK(differing == 20);
    CHECK_THROWS_AS(train_test_split(t, 0.0, 1), ArgumentError);
    CHECK_THROWS_AS(train_test_split(t, 1.0, 1), ArgumentError);
  }

  TEST_CASE("event traces") {
    const auto t = EventTrace::from_chars("BBEBC");
    CHECK(t.size() == 5);
    CHECK(t.count("B") == 3);
    CHECK(t.alphabet() == std::vector<Symbol>{"B", "C", "E"});
    CHECK_THROWS(EventTrace({"A", "Z"}, {"A", "B"}));

    std::istringstream in("A\n\nB\n# note\nFGF\n");
    const auto r = read_event_trace(in);
    CHECK(r.events() == std::vector<Symbol>{"A", "B", "FGF"});
  }

  TEST_CASE("row-aligned events round-trip and read as a plain trace") {
    RowEvents ev;
    ev.timestamps = {10, 70};
    ev.slices = {EventTrace::from_chars("AB"), EventTrace::from_chars("BBA")};
    std::ostringstream out;
    write_row_events(out, ev);
    std::istringstream in(out.str());
    const auto back = read_row_events(in);
    CHECK(back.timestamps == ev.timestamps);
    REQUIRE(back.size() == 2);
    CHECK(back.slices[1].events() == ev.slices[1].events());
    std::istringstream plain(out.str());
    CHECK(read_event_trace(plain).events() == ev.flatten().events());
  }

  TEST_CASE("derived seeds are stable and distinct") {
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  }
}
