#include "icn/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace icn {

namespace {

std::string fixed1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view to_string(DatasetKind k) noexcept { return k == DatasetKind::Full ? "full" : "reduced"; }

DatasetKind parse_dataset_kind(std::string_view s) {
  if (s == "full") return DatasetKind::Full;
  if (s == "reduced") return DatasetKind::Reduced;
  throw ArgumentError("unknown dataset kind '" + std::string(s) + "' (expected full or reduced)");
}

Label label_ground_truth(const DataRow& row, std::span<const std::string> schema, const ThresholdProfile& profile,
                         std::span<const std::string> features, SensitivityDegree s) {
  if (features.empty()) return Label::Normal;
  const std::size_t hits = count_compromised(row, schema, profile, features);
  return hits >= s.required_count(features.size()) ? Label::Anomalous : Label::Normal;
}

Metrics metrics(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
  if (tp + fn == 0) throw UndefinedMetricError("attack detection rate is undefined without attacks");
  if (fp + tn == 0) throw UndefinedMetricError("false positive rate is undefined without normal rows");
  const auto d = [](std::size_t v) { return static_cast<double>(v); };
  return {100.0 * d(tp) / d(tp + fn), 100.0 * d(fp) / d(fp + tn), 100.0 * d(tp + tn) / d(tp + fp + tn + fn)};
}

DualVerdict dual_detect(const DataRow& row, std::span<const std::string> schema, const EventTrace& window,
                        const Model& classifier, const IacModel& iac, SensitivityDegree s, double alpha,
                        double sigma_th) {
  if (row.values.size() != schema.size()) throw ArgumentError("row does not match its schema");
  std::vector<double> x;
  for (const auto& f : features_of(classifier)) {
    auto it = std::find(schema.begin(), schema.end(), f);
    if (it == schema.end()) throw ArgumentError("classifier feature '" + f + "' is not in the data schema");
    x.push_back(row.values[static_cast<std::size_t>(it - schema.begin())]);
  }
  DualVerdict v;
  v.threshold_pass = predict(classifier, x) == Label::Normal;
  v.iac_pass = !classify_trace(window, iac, alpha, sigma_th, s).anomalous;
  v.final = v.threshold_pass && v.iac_pass ? Label::Normal : Label::Anomalous;
  return v;
}

IacModel train_group_iac(const GroupCampaign& group, const IacConfig& config, double significance_pct) {
  return train_iac(group.history_events.slices, significance_pct, config);
}

const ScenarioResult& EvaluationReport::find(Group g, DatasetKind d, int s_pct, ClassifierKind c) const {
  for (const auto& r : rows)
    if (r.group == g && r.dataset == d && r.s_pct == s_pct && r.classifier == c) return r;
  throw ArgumentError("report has no such scenario");
}

const AverageResult& EvaluationReport::average(ClassifierKind c, DatasetKind d, int s_pct) const {
  for (const auto& a : averages)
    if (a.classifier == c && a.dataset == d && a.s_pct == s_pct) return a;
  throw ArgumentError("report has no such average");
}

std::string EvaluationReport::to_csv(std::span<const std::string> comment) const {
  std::ostringstream out;
  for (const auto& c : comment) out << "# " << c << '\n';
  out << "group,dataset,s_pct,classifier,tp,fp,tn,fn,adr,fpr,sa\n";
  for (const auto& r : rows)
    out << to_string(r.group) << ',' << to_string(r.dataset) << ',' << r.s_pct << ',' << to_string(r.classifier)
        << ',' << r.tp << ',' << r.fp << ',' << r.tn << ',' << r.fn << ',' << fixed1(r.adr) << ',' << fixed1(r.fpr)
        << ',' << fixed1(r.sa) << '\n';
  return out.str();
}

std::string EvaluationReport::to_text() const {
  std::vector<ClassifierKind> classifiers;
  std::vector<int> levels;
  std::vector<std::pair<Group, DatasetKind>> columns;
  for (const auto& r : rows) {
    if (std::find(classifiers.begin(), classifiers.end(), r.classifier) == classifiers.end())
      classifiers.push_back(r.classifier);
    if (std::find(levels.begin(), levels.end(), r.s_pct) == levels.end()) levels.push_back(r.s_pct);
    const std::pair col{r.group, r.dataset};
    if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
  }
  std::sort(levels.rbegin(), levels.rend());

  std::ostringstream out;
  char cell[32];
  for (ClassifierKind c : classifiers)
    for (int s : levels) {
      out << upper(to_string(c)) << " results for S% = " << s << "%\n";
      out << "        ";
      for (const auto& [g, d] : columns) {
        std::snprintf(cell, sizeof cell, "%12s", (std::string(to_string(g)) + " " + std::string(to_string(d))).c_str());
        out << cell;
      }
      out << '\n';
      for (int metric = 0; metric < 3; ++metric) {
        static constexpr const char* kNames[] = {"ADR(%)", "FPR(%)", "SA(%)"};
        std::snprintf(cell, sizeof cell, "%-8s", kNames[metric]);
        out << cell;
        for (const auto& [g, d] : columns) {
          const auto& r = find(g, d, s, c);
          const double v = metric == 0 ? r.adr : metric == 1 ? r.fpr : r.sa;
          std::snprintf(cell, sizeof cell, "%12.1f", v);
          out << cell;
        }
        out << '\n';
      }
      out << '\n';
    }
  if (!averages.empty()) {
    out << "Averages over groups\n";
    std::snprintf(cell, sizeof cell, "%-12s%-9s%6s", "classifier", "dataset", "S%");
    out << cell << "    ADR(%)    FPR(%)     SA(%)\n";
    for (const auto& a : averages) {
      char line[96];
      std::snprintf(line, sizeof line, "%-12s%-9s%6d%10.1f%10.1f%10.1f\n", std::string(to_string(a.classifier)).c_str(),
                    std::string(to_string(a.dataset)).c_str(), a.s_pct, a.adr, a.fpr, a.sa);
      out << line;
    }
  }
  return out.str();
}

std::vector<std::string> dataset_features(const Campaign& campaign, DatasetKind kind,
                                          const std::vector<std::string>& reduced) {
  if (kind == DatasetKind::Full) return campaign.config.schema();
  if (reduced.empty()) return campaign.config.signal_names();
  const auto schema = campaign.config.schema();
  for (const auto& f : reduced)
    if (std::find(schema.begin(), schema.end(), f) == schema.end())
      throw SchemaError("reduced feature '" + f + "' is not in the campaign schema");
  return reduced;
}

std::vector<Label> scenario_labels(const DataTrace& trace, const Campaign& campaign, const ThresholdProfile& profile,
                                   std::span<const std::string> features, SensitivityDegree s) {
  std::vector<std::string> truth;
  for (const auto& name : campaign.config.signal_names())
    if (std::find(features.begin(), features.end(), name) != features.end()) truth.push_back(name);
  std::vector<Label> out;
  out.reserve(trace.size());
  for (const auto& row : trace.rows()) out.push_back(label_ground_truth(row, trace.schema(), profile, truth, s));
  return out;
}

LabeledSet pooled_scenario_set(const Campaign& campaign, Group group, int s_pct,
                               std::span<const std::string> features) {
  const auto& gc = campaign.group(group);
  const auto& sc = gc.scenario(s_pct);
  DataTrace pooled = sc.train;
  for (const auto& r : sc.test.rows()) pooled.push_back(r);
  const auto labels = scenario_labels(pooled, campaign, gc.profile, features, SensitivityDegree::from_pct(s_pct));
  return LabeledSet::from_trace(pooled, features, labels);
}

EvaluationReport run_matrix(const Campaign& campaign, const MatrixOptions& options) {
  EvaluationReport report;
  for (Group g : options.groups) {
    const auto& gc = campaign.group(g);
    for (DatasetKind d : options.datasets) {
      const auto features = dataset_features(campaign, d, options.reduced_features);
      for (int pct : options.levels) {
        const auto s = SensitivityDegree::from_pct(pct);
        const auto& sc = gc.scenario(pct);
        const auto train_labels = scenario_labels(sc.train, campaign, gc.profile, features, s);
        const auto test_labels = scenario_labels(sc.test, campaign, gc.profile, features, s);
        const auto train = LabeledSet::from_trace(sc.train, features, train_labels);
        const auto test = LabeledSet::from_trace(sc.test, features, test_labels);
        for (ClassifierKind c : options.classifiers) {
          const Model model = train_model(c, train, options.train);
          ScenarioResult r{g, d, pct, c};
          for (std::size_t i = 0; i < test.size(); ++i) {
            const bool attack = test.label(i) == Label::Anomalous;
            const bool flagged = predict(model, test.row(i)) == Label::Anomalous;
            if (attack) (flagged ? r.tp : r.fn)++;
            else (flagged ? r.fp : r.tn)++;
          }
          const auto m = metrics(r.tp, r.fp, r.tn, r.fn);
          r.adr = m.adr;
          r.fpr = m.fpr;
          r.sa = m.sa;
          report.rows.push_back(r);
        }
      }
    }
  }

  for (ClassifierKind c : options.classifiers)
    for (DatasetKind d : options.datasets)
      for (int pct : options.levels) {
        AverageResult a{c, d, pct};
        std::size_t n = 0;
        for (const auto& r : report.rows)
          if (r.classifier == c && r.dataset == d && r.s_pct == pct) {
            a.adr += r.adr;
            a.fpr += r.fpr;
            a.sa += r.sa;
            ++n;
          }
        if (n == 0) continue;
        a.adr /= static_cast<double>(n);
        a.fpr /= static_cast<double>(n);
        a.sa /= static_cast<double>(n);
        report.averages.push_back(a);
      }
  return report;
}

AcceptanceRule AcceptanceRule::from_json(const nlohmann::ordered_json& j) {
  try {
    AcceptanceRule r;
    if (j.contains("dataset")) r.dataset = parse_dataset_kind(j.at("dataset").get<std::string>());
    if (j.contains("s_pct")) r.s_pct = SensitivityDegree::from_pct(j.at("s_pct").get<int>()).pct();
    if (j.contains("classifier")) r.classifier = parse_classifier(j.at("classifier").get<std::string>());
    r.min_adr = j.value("min_adr", r.min_adr);
    r.max_fpr = j.value("max_fpr", r.max_fpr);
    r.min_sa = j.value("min_sa", r.min_sa);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed acceptance rule: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

nlohmann::ordered_json AcceptanceRule::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  if (dataset) j["dataset"] = std::string(to_string(*dataset));
  if (s_pct) j["s_pct"] = *s_pct;
  if (classifier) j["classifier"] = std::string(to_string(*classifier));
  j["min_adr"] = min_adr;
  j["max_fpr"] = max_fpr;
  j["min_sa"] = min_sa;
  return j;
}

std::vector<std::string> check_acceptance(const EvaluationReport& report, std::span<const AcceptanceRule> rules) {
  std::vector<std::string> failures;
  for (const auto& rule : rules)
    for (const auto& r : report.rows) {
      if (rule.dataset && *rule.dataset != r.dataset) continue;
      if (rule.s_pct && *rule.s_pct != r.s_pct) continue;
      if (rule.classifier && *rule.classifier != r.classifier) continue;
      if (r.adr >= rule.min_adr && r.fpr <= rule.max_fpr && r.sa >= rule.min_sa) continue;
      failures.push_back(std::string(to_string(r.group)) + " " + std::string(to_string(r.dataset)) + " S=" +
                         std::to_string(r.s_pct) + "% " + std::string(to_string(r.classifier)) + ": adr " +
                         fixed1(r.adr) + ", fpr " + fixed1(r.fpr) + ", sa " + fixed1(r.sa));
    }
  return failures;
}

}  // namespace icn
