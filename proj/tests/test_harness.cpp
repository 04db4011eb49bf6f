#include <doctest.h>

#include <cmath>

#include "icn/harness.hpp"
#include "oracles.hpp"

using namespace icn;

namespace {

const std::vector<std::string> kSignals{"FGF", "MSV", "GBV", "EGT", "Power"};

ThresholdProfile published_profile() {
  const double psi[] = {500, 45, 5, 560, 1120}, p_th[] = {445, 18.75, 2.50, 532, 1032};
  std::vector<ParameterProfile> params;
  for (std::size_t i = 0; i < 5; ++i) {
    const double mu = oracle::invert_threshold(psi[i], p_th[i]);
    const auto t = compute_threshold(psi[i], mu);
    params.push_back({ParameterSpec{kSignals[i], psi[i], mu, t.p_th}, t.delta});
  }
  return ThresholdProfile(std::move(params), 0.1, 1440);
}

DataRow signal_row(std::vector<double> v) { return DataRow{0, Group::MD, std::move(v), std::nullopt}; }

const Campaign& default_campaign() {
  static const Campaign campaign = gen_campaign(GeneratorConfig::defaults());
  return campaign;
}

const EvaluationReport& default_report() {
  static const EvaluationReport report = run_matrix(default_campaign());
  return report;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("metrics") {
    const auto m = metrics(25, 32, 103, 20);
    CHECK(std::round(m.adr * 10) / 10 == 55.6);
    CHECK(std::round(m.fpr * 10) / 10 == 23.7);
    CHECK(std::round(m.sa * 10) / 10 == 71.1);
    const auto perfect = metrics(45, 0, 135, 0);
    CHECK(perfect.adr == 100);
    CHECK(perfect.fpr == 0);
    CHECK(perfect.sa == 100);
    const auto all_normal = metrics(0, 0, 135, 45);
    CHECK(all_normal.adr == 0);
    CHECK(all_normal.fpr == 0);
    CHECK(all_normal.sa == 75);
    CHECK_THROWS_AS(metrics(0, 1, 1, 0), UndefinedMetricError);
    CHECK_THROWS_AS(metrics(1, 0, 0, 1), UndefinedMetricError);
    // a published result column is self-consistent
    CHECK((55.6 * 45 + (100 - 23.7) * 135) / 180 == doctest::Approx(71.1).epsilon(0.001));
  }

  TEST_CASE("ground truth of the sample attack rows per sensitivity") {
    const auto profile = published_profile();
    const auto row1 = signal_row({484, 12.636, 1.365, 470, 884});
    const auto row2 = signal_row({474, 10.998, 1.425, 547, 1078});
    const auto row3 = signal_row({447, 23.51, 4.56, 557, 1103});
    const auto normal = signal_row({329, 10.51, 1.43, 469, 918});
    auto label = [&](const DataRow& r, int pct) {
      return label_ground_truth(r, kSignals, profile, kSignals, SensitivityDegree::from_pct(pct));
    };
    CHECK(label(row1, 20) == Label::Normal);
    CHECK(label(row1, 60) == Label::Normal);
    CHECK(label(row1, 100) == Label::Anomalous);
    CHECK(label(row2, 20) == Label::Normal);
    CHECK(label(row2, 60) == Label::Anomalous);
    CHECK(label(row2, 100) == Label::Anomalous);
    for (int pct : kSensitivityLevels) {
      CHECK(label(row3, pct) == Label::Anomalous);
      CHECK(label(normal, pct) == Label::Normal);
    }
  }

  TEST_CASE("label monotonicity over the campaign") {
    const auto& campaign = default_campaign();
    for (const auto& gc : campaign.groups)
      for (const auto& sc : gc.scenarios) {
        const auto features = campaign.config.signal_names();
        const auto l20 = scenario_labels(sc.test, campaign, gc.profile, features, SensitivityDegree::least());
        const auto l60 = scenario_labels(sc.test, campaign, gc.profile, features, SensitivityDegree::medium());
        const auto l100 = scenario_labels(sc.test, campaign, gc.profile, features, SensitivityDegree::high());
        for (std::size_t i = 0; i < l20.size(); ++i) {
          if (l20[i] == Label::Anomalous) CHECK(l60[i] == Label::Anomalous);
          if (l60[i] == Label::Anomalous) CHECK(l100[i] == Label::Anomalous);
        }
        // ground truth agrees with the injected label at the matching level
        const auto matched = scenario_labels(sc.test, campaign, gc.profile, features,
                                             SensitivityDegree::from_pct(sc.s_pct));
        for (std::size_t i = 0; i < matched.size(); ++i) CHECK(matched[i] == sc.test[i].label);
      }
  }

  TEST_CASE("dataset views") {
    const auto& campaign = default_campaign();
    CHECK(dataset_features(campaign, DatasetKind::Full).size() == 18);
    CHECK(dataset_features(campaign, DatasetKind::Reduced) == kSignals);
    CHECK_THROWS_AS(dataset_features(campaign, DatasetKind::Reduced, {"FGF", "XYZ"}), SchemaError);
    CHECK(parse_dataset_kind("reduced") == DatasetKind::Reduced);
    CHECK_THROWS_AS(parse_dataset_kind("half"), ArgumentError);
  }

  TEST_CASE("report shape and arithmetic identity") {
    const auto& report = default_report();
    CHECK(report.rows.size() == 72);
    CHECK(report.averages.size() == 18);
    for (const auto& r : report.rows) {
      const double p = static_cast<double>(r.tp + r.fn), n = static_cast<double>(r.fp + r.tn);
      CHECK(p == 45);
      CHECK(n == 135);
      CHECK(std::abs(r.sa * (p + n) - (r.adr * p + (100 - r.fpr) * n)) <= 1e-6);
      CHECK(r.adr >= 0);
      CHECK(r.adr <= 100);
      CHECK(r.fpr >= 0);
      CHECK(r.fpr <= 100);
    }
    const auto csv = report.to_csv();
    CHECK(csv.rfind("group,dataset,s_pct,classifier,tp,fp,tn,fn,adr,fpr,sa\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 73);
    const auto text = report.to_text();
    CHECK(text.find("SVM results for S% = 100%") != std::string::npos);
    CHECK(text.find("C45 results for S% = 20%") != std::string::npos);
  }

  TEST_CASE("reduced view at S = 20% is perfect") {
    const auto& report = default_report();
    for (Group g : kAllGroups)
      for (auto c : kAllClassifiers) {
        const auto& r = report.find(g, DatasetKind::Reduced, 20, c);
        CHECK(r.adr == 100);
        CHECK(r.fpr == 0);
        CHECK(r.sa == 100);
      }
  }

  TEST_CASE("restricted matrices and determinism") {
    const auto& campaign = default_campaign();
    MatrixOptions options;
    options.groups = {Group::ND};
    options.levels = {60};
    options.classifiers = {ClassifierKind::Knn};
    const auto a = run_matrix(campaign, options);
    CHECK(a.rows.size() == 2);
    CHECK(a.to_csv() == run_matrix(campaign, options).to_csv());
    const auto& full = default_report().find(Group::ND, DatasetKind::Full, 60, ClassifierKind::Knn);
    CHECK(a.find(Group::ND, DatasetKind::Full, 60, ClassifierKind::Knn).tp == full.tp);
  }

  TEST_CASE("acceptance rules") {
    const auto& report = default_report();
    AcceptanceRule strict;
    strict.dataset = DatasetKind::Reduced;
    strict.s_pct = 20;
    strict.min_adr = 100;
    strict.max_fpr = 0;
    strict.min_sa = 100;
    CHECK(check_acceptance(report, std::vector<AcceptanceRule>{strict}).empty());
    AcceptanceRule impossible;
    impossible.min_sa = 100.5;
    CHECK(check_acceptance(report, std::vector<AcceptanceRule>{impossible}).size() == 72);
    const auto back = AcceptanceRule::from_json(strict.to_json());
    CHECK(back.to_json() == strict.to_json());
    CHECK_THROWS_AS(AcceptanceRule::from_json(nlohmann::ordered_json{{"s_pct", 50}}), ConfigError);
  }

  TEST_CASE("dual detection") {
    const auto& campaign = default_campaign();
    const auto& gc = campaign.group(Group::MD);
    const auto iac = train_group_iac(gc);
    CHECK(iac.feature_events() .size() == 5);
    const auto features = campaign.config.signal_names();
    const auto& sc = gc.scenario(20);
    const auto labels = scenario_labels(sc.train, campaign, gc.profile, features, SensitivityDegree::least());
    const auto train = LabeledSet::from_trace(sc.train, features, labels);
    const auto conforming = row_schedule(campaign.config);
    const auto burst = row_schedule(campaign.config, {"FGF"}, 1);
    const auto s = SensitivityDegree::least();

    std::size_t normal_row = 0;
    while (sc.test[normal_row].label != Label::Normal) ++normal_row;
    const auto& row = sc.test[normal_row];
    const auto row3 = signal_row({447, 23.51, 4.56, 557, 1103});

    for (auto kind : kAllClassifiers) {
      const auto model = train_model(kind, train);
      const auto ok = dual_detect(row, sc.test.schema(), conforming, model, iac, s, 0.05, 0.05);
      CHECK(ok.threshold_pass);
      CHECK(ok.iac_pass);
      CHECK(ok.final == Label::Normal);

      const auto attack = dual_detect(row3, kSignals, conforming, model, iac, s, 0.05, 0.05);
      CHECK_FALSE(attack.threshold_pass);
      CHECK(attack.iac_pass);
      CHECK(attack.final == Label::Anomalous);

      const auto bursty = dual_detect(row, sc.test.schema(), burst, model, iac, SensitivityDegree::high(), 0.05, 0.05);
      CHECK(bursty.threshold_pass);
      CHECK_FALSE(bursty.iac_pass);
      CHECK(bursty.final == Label::Anomalous);
    }
    const auto model = train_model(ClassifierKind::Knn, train);
    const std::vector<std::string> wrong{"A", "B"};
    CHECK_THROWS_AS(dual_detect(signal_row({1, 2}), wrong, conforming, model, iac, s, 0.05, 0.05), ArgumentError);
  }
}
