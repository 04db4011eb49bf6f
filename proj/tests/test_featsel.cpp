#include <doctest.h>

#include <random>

#include "icn/featsel.hpp"
#include "icn/harness.hpp"

using namespace icn;

namespace {

/// Feature 0 separates the classes; the rest are uniform noise.
LabeledSet one_signal(std::size_t noise, std::uint32_t seed = 3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::vector<double>> rows;
  std::vector<Label> y;
  for (int i = 0; i < 60; ++i) {
    const bool attack = i % 4 == 0;
    std::vector<double> r{attack ? 2 + u(rng) : u(rng)};
    for (std::size_t k = 0; k < noise; ++k) r.push_back(u(rng));
    rows.push_back(r);
    y.push_back(attack ? Label::Anomalous : Label::Normal);
  }
  return LabeledSet::from_rows(rows, y);
}

}  // namespace

TEST_SUITE("featsel") {
  TEST_CASE("cross-validated accuracy") {
    const auto d = one_signal(1);
    const std::size_t signal[] = {0};
    CHECK(cross_validated_accuracy(d, ClassifierKind::C45, signal) == 1.0);
    CHECK(cross_validated_accuracy(d, ClassifierKind::Knn, signal) == 1.0);
    CHECK(cross_validated_accuracy(d, ClassifierKind::Svm, signal) ==
          cross_validated_accuracy(d, ClassifierKind::Svm, signal));
    const std::size_t bad[] = {5};
    CHECK_THROWS_AS(cross_validated_accuracy(d, ClassifierKind::Knn, bad), ArgumentError);
  }

  TEST_CASE("greedy keeps the separating feature") {
    for (auto kind : kAllClassifiers) {
      const auto r = greedy_select(one_signal(1), kind, 2);
      CHECK(r.indices == std::vector<std::size_t>{0});
      CHECK(r.score == 1.0);
    }
  }

  TEST_CASE("identical copies resolve to the lowest index") {
    const auto base = one_signal(0);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < base.size(); ++i) {
      const double v = base.row(i)[0];
      rows.push_back({v, v, v});
    }
    const auto d = LabeledSet::from_rows(rows, base.labels());
    CHECK(greedy_select(d, ClassifierKind::C45, 3).indices == std::vector<std::size_t>{0});
    CHECK(exhaustive_select(d, ClassifierKind::C45, 3).indices == std::vector<std::size_t>{0});
  }

  TEST_CASE("exhaustive agrees on a small problem") {
    const auto d = one_signal(3);
    const auto r = exhaustive_select(d, ClassifierKind::Knn, 4);
    CHECK(r.indices == std::vector<std::size_t>{0});
    CHECK(search_select(d, ClassifierKind::Knn, 4).indices == r.indices);
  }

  TEST_CASE("unlabeled or one-class data is rejected") {
    const auto d = LabeledSet::from_rows({{1}, {2}, {3}}, {Label::Normal, Label::Normal, Label::Normal});
    CHECK_THROWS_AS(greedy_select(d, ClassifierKind::Knn, 1), ArgumentError);
    CHECK_THROWS_AS(genetic_select(d, ClassifierKind::Knn, GaConfig{}), ArgumentError);
  }

  TEST_CASE("genetic search") {
    const auto d = one_signal(5);
    SUBCASE("identity GA keeps the seeded optimum") {
      GaConfig config;
      config.population = 6;
      config.generations = 5;
      config.crossover_rate = 0;
      config.mutation_rate = 0;
      config.initial = {{true, false, false, false, false, false}};
      const auto r = genetic_select(d, ClassifierKind::C45, config);
      CHECK(r.best.indices == std::vector<std::size_t>{0});
    }
    SUBCASE("finds the signal and never loses ground") {
      GaConfig config;
      config.population = 12;
      config.generations = 10;
      const auto r = genetic_select(d, ClassifierKind::C45, config);
      CHECK(r.best.indices == std::vector<std::size_t>{0});
      CHECK(r.best_fitness_history.size() == config.generations);
      for (std::size_t i = 1; i < r.best_fitness_history.size(); ++i)
        CHECK(r.best_fitness_history[i] >= r.best_fitness_history[i - 1]);
      CHECK(r.best_fitness == doctest::Approx(r.best.score - config.parsimony * r.best.indices.size()));
    }
    SUBCASE("same seed, same answer") {
      GaConfig config;
      config.population = 10;
      config.generations = 6;
      CHECK(genetic_select(d, ClassifierKind::Knn, config).best.indices ==
            genetic_select(d, ClassifierKind::Knn, config).best.indices);
    }
    SUBCASE("bad configs") {
      GaConfig config;
      config.population = 0;
      CHECK_THROWS_AS(genetic_select(d, ClassifierKind::Knn, config), ArgumentError);
      config.population = 10;
      config.mutation_rate = 1.5;
      CHECK_THROWS_AS(genetic_select(d, ClassifierKind::Knn, config), ArgumentError);
    }
  }

  TEST_CASE("planted-signal campaign: greedy recovers the five signals") {
    const auto campaign = gen_campaign(GeneratorConfig::defaults());
    const auto schema = campaign.config.schema();
    REQUIRE(schema.size() == 18);
    const auto set = pooled_scenario_set(campaign, Group::MD, 100, schema);
    const auto r = greedy_select(set, ClassifierKind::C45, schema.size());
    std::vector<std::string> names;
    for (auto i : r.indices) names.push_back(schema[i]);
    CHECK(names == campaign.config.signal_names());
  }
}
