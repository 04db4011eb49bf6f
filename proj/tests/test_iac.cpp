#include <doctest.h>

#include <limits>
#include <random>

#include "icn/iac.hpp"
#include "oracles.hpp"

using namespace icn;

namespace {

const std::string kReferenceTrace = "BBEBCABEABDBBBEBCBAABBBEB";

std::string repeat(const std::string& unit, std::size_t times) {
  std::string s;
  for (std::size_t i = 0; i < times; ++i) s += unit;
  return s;
}

}  // namespace

TEST_SUITE("iac") {
  TEST_CASE("curves of a two-event trace") {
    const auto c = min_max_curves(EventTrace::from_chars("BB"), "B", 2);
    CHECK(c.min.values == std::vector<double>{1, 2});
    CHECK(c.max.values == std::vector<double>{1, 2});
  }

  TEST_CASE("reference trace") {
    const auto trace = EventTrace::from_chars(kReferenceTrace);
    CHECK(trace.count("B") == 14);
    const auto c = min_max_curves(trace, "B", 12);
    CHECK(c.min.at(1) == 1);
    CHECK(c.max.at(1) == 1);
    CHECK(c.min.at(2) == 1);
    CHECK(c.max.at(2) == 2);
    for (std::size_t w = 2; w <= c.max.max_window(); ++w) {
      CHECK(c.min.at(w) >= c.min.at(w - 1));
      CHECK(c.max.at(w) >= c.max.at(w - 1));
      CHECK(c.max.at(w) <= std::min<double>(static_cast<double>(w), 14));
      CHECK(c.min.at(w) <= c.max.at(w));
    }
    const auto o = oracle::window_enumerator(kReferenceTrace, 'B', 12);
    CHECK(c.min.values == o.min);
    CHECK(c.max.values == o.max);
  }

  TEST_CASE("w = 1 is always one") {
    std::mt19937 rng(3);
    for (int k = 0; k < 50; ++k) {
      std::string s;
      for (int i = 0; i < 30; ++i) s += static_cast<char>('A' + rng() % 4);
      const auto t = EventTrace::from_chars(s);
      for (const auto& e : t.alphabet()) {
        const auto c = min_max_curves(t, e, 1);
        CHECK(c.min.at(1) == 1);
        CHECK(c.max.at(1) == 1);
      }
    }
  }

  TEST_CASE("absent event and bad window") {
    const auto t = EventTrace::from_chars("AB");
    CHECK_THROWS_AS(min_max_curves(t, "Z", 3), EventNotFoundError);
    CHECK_THROWS_AS(min_max_curves(t, "A", 0), ArgumentError);
  }

  TEST_CASE("random multi-symbol traces agree with the enumerator") {
    std::mt19937 rng(17);
    for (int k = 0; k < 300; ++k) {
      std::string s;
      const auto len = 1 + rng() % 40;
      for (std::size_t i = 0; i < len; ++i) s += static_cast<char>('A' + rng() % 3);
      const std::size_t w_delta = 1 + rng() % 20;
      const auto t = EventTrace::from_chars(s);
      for (char e : std::string("ABC")) {
        if (s.find(e) == std::string::npos) continue;
        const auto c = min_max_curves(t, std::string(1, e), w_delta);
        const auto o = oracle::window_enumerator(s, e, w_delta);
        CHECK(c.min.values == o.min);
        CHECK(c.max.values == o.max);
      }
    }
  }

  TEST_CASE("feature event selection") {
    const std::vector<EventTrace> one{EventTrace::from_chars(kReferenceTrace)};
    CHECK(select_feature_events(one, 100) == std::vector<Symbol>{"B", "A", "E", "C", "D"});
    CHECK(select_feature_events(one, 20) == std::vector<Symbol>{"B"});
    CHECK(select_feature_events(one, 60) == std::vector<Symbol>{"B", "A"});
    CHECK_THROWS_AS(select_feature_events(one, 0), ArgumentError);
  }

  TEST_CASE("aggregate") {
    SUBCASE("identical curves give a zero-width band") {
      const auto c = min_max_curves(EventTrace::from_chars("BABBAB"), "B", 3);
      const std::vector<CurvePair> pairs{c, c};
      const auto m = aggregate(pairs, 0.95);
      CHECK(m.min.mean == c.min.values);
      CHECK(m.max.lower == c.max.values);
      CHECK(m.max.upper == c.max.values);
    }
    SUBCASE("two samples give the textbook t interval") {
      // c_max(3) = 2 for "BBAB", 3 for "BBBA".
      const std::vector<CurvePair> pairs{min_max_curves(EventTrace::from_chars("BBAB"), "B", 3),
                                         min_max_curves(EventTrace::from_chars("BBBA"), "B", 3)};
      REQUIRE(pairs[0].max.at(3) == 2);
      REQUIRE(pairs[1].max.at(3) == 3);
      const auto m = aggregate(pairs, 0.95);
      CHECK(m.max.mean[2] == doctest::Approx(2.5));
      const double half = 12.706 * (0.70710678 / std::sqrt(2.0));
      CHECK(half == doctest::Approx(6.353).epsilon(0.001));
      CHECK(m.max.upper[2] - 2.5 == doctest::Approx(half).epsilon(0.001));
      CHECK(2.5 - m.max.lower[2] == doctest::Approx(half).epsilon(0.001));
    }
    SUBCASE("w = 1 band is [1, 1]") {
      std::vector<CurvePair> pairs;
      for (const char* s : {"BA", "AB", "BBB", "ABAB", "B"}) pairs.push_back(min_max_curves(EventTrace::from_chars(s), "B", 1));
      const auto m = aggregate(pairs, 0.95);
      CHECK(m.min.lower[0] == 1);
      CHECK(m.min.upper[0] == 1);
      CHECK(m.max.lower[0] == 1);
      CHECK(m.max.upper[0] == 1);
    }
    SUBCASE("one trace is not enough") {
      const std::vector<CurvePair> pairs{min_max_curves(EventTrace::from_chars("B"), "B", 1)};
      CHECK_THROWS_AS(aggregate(pairs, 0.95), InsufficientDataError);
    }
  }

  TEST_CASE("classify_trace") {
    std::vector<EventTrace> training;
    for (int k = 0; k < 5; ++k) training.push_back(EventTrace::from_chars(repeat("BA", 20 + k)));
    const auto model = train_iac(training, std::vector<Symbol>{"B"});

    SUBCASE("replayed training trace is normal") {
      const auto v = classify_trace(training[2], model, 0.05, 0.05, SensitivityDegree::high());
      CHECK_FALSE(v.anomalous);
      CHECK(v.anomalous_events == 0);
    }
    SUBCASE("period four instead of two") {
      const auto v = classify_trace(EventTrace::from_chars(repeat("BAAA", 10)), model, 0.05, 0.05,
                                    SensitivityDegree::high());
      REQUIRE(v.events.size() >= 1);
      CHECK(v.events[0].event == "B");
      CHECK(v.events[0].anomalous);
      CHECK(v.anomalous);
    }
    SUBCASE("infinite deviation threshold never alarms") {
      const double inf = std::numeric_limits<double>::infinity();
      for (const auto& s : {repeat("BAAA", 10), repeat("B", 30), std::string("CCCC")}) {
        const auto v = classify_trace(EventTrace::from_chars(s), model, 0.05, inf, SensitivityDegree::high());
        CHECK_FALSE(v.anomalous);
      }
    }
    SUBCASE("unseen event is anomalous") {
      const auto v = classify_trace(EventTrace::from_chars(repeat("BC", 20)), model, 0.05, 0.05,
                                    SensitivityDegree::high());
      CHECK(v.anomalous);
      bool saw_unknown = false;
      for (const auto& e : v.events) saw_unknown |= e.event == "C" && e.unknown && e.anomalous;
      CHECK(saw_unknown);
    }
    SUBCASE("JSON round-trip keeps verdicts") {
      const auto back = IacModel::from_json(model.to_json());
      CHECK(back.feature_events() == model.feature_events());
      CHECK(back.config().w_delta == model.config().w_delta);
      const auto t = EventTrace::from_chars(repeat("BAAA", 10));
      CHECK(classify_trace(t, back, SensitivityDegree::high()).anomalous ==
            classify_trace(t, model, SensitivityDegree::high()).anomalous);
    }
  }
}
