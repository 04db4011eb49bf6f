// icn-sentinel: generate campaigns, train, detect, select features and
// evaluate the classifier matrix from the command line.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "icn/featsel.hpp"
#include "icn/harness.hpp"
#include "icn/iac.hpp"
#include "icn/synth.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAcceptance = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr std::uint64_t kDefaultSeed = 42;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything a run needs, resolved from defaults, the config file and flags.
struct RunConfig {
  icn::GeneratorConfig generator = icn::GeneratorConfig::defaults();
  icn::IacConfig iac;
  double significance_pct = icn::kDefaultSignificancePct;
  icn::TrainOptions train;
  icn::GaConfig ga;
  icn::CvOptions cv;
  std::vector<icn::AcceptanceRule> acceptance;
  std::uint64_t seed = kDefaultSeed;

  ojson to_json() const {
    ojson rules = ojson::array();
    for (const auto& r : acceptance) rules.push_back(r.to_json());
    ojson gen = generator.to_json();
    gen.erase("seed");
    return {{"seed", seed},
            {"generator", gen},
            {"iac",
             {{"w_delta", iac.w_delta},
              {"confidence", iac.confidence},
              {"alpha", iac.alpha},
              {"sigma_th", iac.sigma_th},
              {"significance_pct", significance_pct}}},
            {"svm", {{"c_param", train.svm.c_param}, {"epochs", train.svm.epochs}}},
            {"knn",
             {{"k", train.knn.k}, {"metric", train.knn.metric == icn::Metric::Euclidean ? "euclidean" : "manhattan"}}},
            {"c45", {{"min_leaf", train.c45.min_leaf}, {"cf", train.c45.cf}}},
            {"featsel",
             {{"folds", cv.folds},
              {"population", ga.population},
              {"generations", ga.generations},
              {"crossover_rate", ga.crossover_rate},
              {"mutation_rate", ga.mutation_rate},
              {"parsimony", ga.parsimony}}},
            {"acceptance", rules}};
  }

  std::string hash() const { return icn::fnv1a_hex(to_json().dump()); }

  std::vector<std::string> provenance() const {
    return {"seed " + std::to_string(seed), "config_hash " + hash()};
  }
};

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string data = ".";
  std::string models;
  std::string algo = "svm";
  std::string dataset = "reduced";
  int sensitivity = 20;
  std::string groups = "MD,AD,ED,ND";
  std::optional<double> alpha;
  std::optional<double> sigma_th;
  std::optional<std::size_t> w_delta;
  std::string method = "both";
};

ojson read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw icn::IoError("cannot open '" + path + "' for reading");
  try {
    return ojson::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw icn::ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw icn::IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw icn::IoError("failed writing '" + path.string() + "'");
}

void write_json_file(const fs::path& path, const ojson& j) { write_text_file(path, j.dump(2) + "\n"); }

template <class T>
void take(const ojson& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

RunConfig apply_config(const ojson& j) {
  RunConfig rc;
  try {
    if (j.contains("generator")) rc.generator = icn::GeneratorConfig::from_json(j.at("generator"));
    if (j.contains("iac")) {
      const auto& s = j.at("iac");
      take(s, "w_delta", rc.iac.w_delta);
      take(s, "confidence", rc.iac.confidence);
      take(s, "alpha", rc.iac.alpha);
      take(s, "sigma_th", rc.iac.sigma_th);
      take(s, "significance_pct", rc.significance_pct);
    }
    if (j.contains("svm")) {
      take(j.at("svm"), "c_param", rc.train.svm.c_param);
      take(j.at("svm"), "epochs", rc.train.svm.epochs);
    }
    if (j.contains("knn")) {
      take(j.at("knn"), "k", rc.train.knn.k);
      if (j.at("knn").contains("metric")) {
        const auto m = j.at("knn").at("metric").get<std::string>();
        if (m != "euclidean" && m != "manhattan") throw icn::ConfigError("unknown k-NN metric '" + m + "'");
        rc.train.knn.metric = m == "euclidean" ? icn::Metric::Euclidean : icn::Metric::Manhattan;
      }
    }
    if (j.contains("c45")) {
      take(j.at("c45"), "min_leaf", rc.train.c45.min_leaf);
      take(j.at("c45"), "cf", rc.train.c45.cf);
    }
    if (j.contains("featsel")) {
      const auto& s = j.at("featsel");
      take(s, "folds", rc.cv.folds);
      take(s, "population", rc.ga.population);
      take(s, "generations", rc.ga.generations);
      take(s, "crossover_rate", rc.ga.crossover_rate);
      take(s, "mutation_rate", rc.ga.mutation_rate);
      take(s, "parsimony", rc.ga.parsimony);
    }
    if (j.contains("acceptance"))
      for (const auto& r : j.at("acceptance")) rc.acceptance.push_back(icn::AcceptanceRule::from_json(r));
    else
      rc.acceptance.push_back(icn::AcceptanceRule{icn::DatasetKind::Reduced, 20, std::nullopt, 100.0, 0.0, 100.0});
    if (j.contains("seed")) rc.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw icn::ConfigError(std::string("malformed config: ") + e.what());
  }
  return rc;
}

std::uint64_t parse_seed_text(const std::string& text, const char* origin) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw UsageError(std::string(origin) + " is not an unsigned integer: '" + text + "'");
  return v;
}

RunConfig resolve(const CommonFlags& f, const std::string& fallback_config = {}) {
  ojson j = ojson::object();
  if (!f.config_path.empty()) {
    if (!fs::exists(f.config_path)) throw UsageError("config file '" + f.config_path + "' does not exist");
    j = read_json_file(f.config_path);
  } else if (!fallback_config.empty() && fs::exists(fallback_config)) {
    j = read_json_file(fallback_config);
  }
  RunConfig rc = apply_config(j);
  if (f.seed) {
    rc.seed = *f.seed;
  } else if (!j.contains("seed")) {
    if (const char* env = std::getenv("ICN_SENTINEL_SEED")) rc.seed = parse_seed_text(env, "ICN_SENTINEL_SEED");
  }
  rc.generator.seed = rc.seed;
  if (f.alpha) rc.iac.alpha = *f.alpha;
  if (f.sigma_th) rc.iac.sigma_th = *f.sigma_th;
  if (f.w_delta) rc.iac.w_delta = *f.w_delta;
  if (!(rc.iac.alpha > 0.0 && rc.iac.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  if (!(rc.iac.sigma_th >= 0.0)) throw UsageError("--sigma-th must be >= 0");
  if (rc.iac.w_delta == 0) throw UsageError("--w-delta must be >= 1");
  rc.generator.validate();
  return rc;
}

std::vector<icn::Group> parse_groups(const std::string& list) {
  std::vector<icn::Group> out;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) {
      try {
        out.push_back(icn::parse_group(tok));
      } catch (const icn::SchemaError& e) {
        throw UsageError(e.what());
      }
    }
  if (out.empty()) throw UsageError("--groups lists no group");
  return out;
}

int parse_sensitivity(int pct) {
  try {
    return icn::SensitivityDegree::from_pct(pct).pct();
  } catch (const icn::Error& e) {
    throw UsageError(e.what());
  }
}

std::string file_stem(icn::Group g, const std::string& part) { return std::string(icn::to_string(g)) + "_" + part; }
std::string scenario_stem(icn::Group g, int pct, const char* half) {
  return file_stem(g, "S" + std::to_string(pct) + "_" + half);
}

// ---------------------------------------------------------------------------
// Campaign I/O

void write_manifest(const fs::path& dir, const RunConfig& rc, const std::vector<std::string>& files) {
  ojson list = ojson::array();
  for (const auto& name : files) {
    std::ifstream in(dir / name, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    list.push_back({{"name", name}, {"bytes", buf.str().size()}, {"fnv1a", icn::fnv1a_hex(buf.str())}});
  }
  write_json_file(dir / "manifest.json", {{"seed", rc.seed}, {"config_hash", rc.hash()}, {"files", list}});
}

std::vector<std::string> write_campaign(const icn::Campaign& campaign, const RunConfig& rc, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw icn::IoError("cannot create '" + dir.string() + "': " + ec.message());
  const auto comment = rc.provenance();
  std::vector<std::string> files;
  auto data = [&](const std::string& stem, const icn::DataTrace& t) {
    icn::write_data_trace((dir / (stem + ".csv")).string(), t, comment);
    files.push_back(stem + ".csv");
  };
  auto events = [&](const std::string& stem, const icn::RowEvents& e) {
    icn::write_row_events((dir / (stem + ".events")).string(), e, comment);
    files.push_back(stem + ".events");
  };
  for (const auto& gc : campaign.groups) {
    data(file_stem(gc.group, "history"), gc.history);
    events(file_stem(gc.group, "history"), gc.history_events);
    for (const auto& sc : gc.scenarios) {
      data(scenario_stem(gc.group, sc.s_pct, "train"), sc.train);
      events(scenario_stem(gc.group, sc.s_pct, "train"), sc.train_events);
      data(scenario_stem(gc.group, sc.s_pct, "test"), sc.test);
      events(scenario_stem(gc.group, sc.s_pct, "test"), sc.test_events);
    }
  }
  write_json_file(dir / "config.json", rc.to_json());
  files.push_back("config.json");
  write_manifest(dir, rc, files);
  return files;
}

icn::Campaign load_campaign(const fs::path& dir, const RunConfig& rc, const std::vector<icn::Group>& groups) {
  icn::Campaign campaign{rc.generator, {}};
  const auto schema = rc.generator.schema();
  for (icn::Group g : groups) {
    icn::GroupCampaign gc;
    gc.group = g;
    gc.history = icn::parse_data_trace((dir / (file_stem(g, "history") + ".csv")).string(), schema);
    gc.history_events = icn::parse_row_events((dir / (file_stem(g, "history") + ".events")).string());
    gc.profile = icn::build_profile(gc.history, rc.generator.limits(), rc.generator.trim_fraction,
                                    rc.generator.window_len);
    for (int pct : icn::kSensitivityLevels) {
      icn::ScenarioData sc;
      sc.s_pct = pct;
      sc.pattern = rc.generator.attack_pattern.value_or(icn::pattern_for_sensitivity(pct));
      sc.train = icn::parse_data_trace((dir / (scenario_stem(g, pct, "train") + ".csv")).string(), schema);
      sc.test = icn::parse_data_trace((dir / (scenario_stem(g, pct, "test") + ".csv")).string(), schema);
      sc.train_events = icn::parse_row_events((dir / (scenario_stem(g, pct, "train") + ".events")).string());
      sc.test_events = icn::parse_row_events((dir / (scenario_stem(g, pct, "test") + ".events")).string());
      if (sc.test_events.size() != sc.test.size() || sc.train_events.size() != sc.train.size())
        throw icn::SchemaError("event slices do not align with data rows for " + scenario_stem(g, pct, "*"));
      gc.scenarios.push_back(std::move(sc));
    }
    campaign.groups.push_back(std::move(gc));
  }
  return campaign;
}

// Campaign from --data when it holds one, otherwise generated in memory.
icn::Campaign campaign_for(const CommonFlags& f, const RunConfig& rc, const std::vector<icn::Group>& groups) {
  if (fs::exists(fs::path(f.data) / "manifest.json")) return load_campaign(f.data, rc, groups);
  return icn::gen_campaign(rc.generator);
}

std::string model_name(icn::Group g, int pct, icn::DatasetKind d, icn::ClassifierKind c) {
  return scenario_stem(g, pct, std::string(icn::to_string(d)).c_str()) + "_" + std::string(icn::to_string(c)) +
         ".model.json";
}

ojson with_provenance(ojson j, const RunConfig& rc) {
  j["seed"] = rc.seed;
  j["config_hash"] = rc.hash();
  return j;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_gen(const CommonFlags& f) {
  if (f.config_path.empty()) throw UsageError("gen requires --config");
  const RunConfig rc = resolve(f);
  const auto campaign = icn::gen_campaign(rc.generator);
  const auto files = write_campaign(campaign, rc, f.out);
  std::cout << "wrote " << files.size() + 1 << " files to " << f.out << " (seed " << rc.seed << ", config "
            << rc.hash() << ")\n";
  return kExitOk;
}

int cmd_train(const CommonFlags& f) {
  const RunConfig rc = resolve(f, (fs::path(f.data) / "config.json").string());
  const auto groups = parse_groups(f.groups);
  const int pct = parse_sensitivity(f.sensitivity);
  const auto kind = icn::parse_classifier(f.algo);
  const auto dataset = icn::parse_dataset_kind(f.dataset);
  const auto campaign = campaign_for(f, rc, groups);
  const fs::path out = f.out;
  fs::create_directories(out);

  for (icn::Group g : groups) {
    const auto& gc = campaign.group(g);
    const auto& sc = gc.scenario(pct);
    const auto features = icn::dataset_features(campaign, dataset);
    const auto labels =
        icn::scenario_labels(sc.train, campaign, gc.profile, features, icn::SensitivityDegree::from_pct(pct));
    const auto set = icn::LabeledSet::from_trace(sc.train, features, labels);
    const auto model = icn::train_model(kind, set, rc.train);
    const auto iac = icn::train_group_iac(gc, rc.iac, rc.significance_pct);

    write_json_file(out / model_name(g, pct, dataset, kind), with_provenance(icn::model_to_json(model), rc));
    write_json_file(out / (file_stem(g, "profile") + ".json"), with_provenance(gc.profile.to_json(), rc));
    write_json_file(out / (file_stem(g, "iac") + ".json"), with_provenance(iac.to_json(), rc));
    std::cout << icn::to_string(g) << ": " << icn::to_string(kind) << " on " << set.size() << " rows ("
              << set.count(icn::Label::Anomalous) << " attacks), training accuracy "
              << icn::format_double(icn::accuracy(model, set)) << "\n";
  }
  return kExitOk;
}

int cmd_detect(const CommonFlags& f) {
  const RunConfig rc = resolve(f, (fs::path(f.data) / "config.json").string());
  const auto groups = parse_groups(f.groups);
  const int pct = parse_sensitivity(f.sensitivity);
  const auto s = icn::SensitivityDegree::from_pct(pct);
  const auto kind = icn::parse_classifier(f.algo);
  const auto dataset = icn::parse_dataset_kind(f.dataset);
  const auto campaign = campaign_for(f, rc, groups);
  const fs::path models = f.models.empty() ? fs::path(f.out) : fs::path(f.models);
  const fs::path out = f.out;
  fs::create_directories(out);

  for (icn::Group g : groups) {
    const auto& gc = campaign.group(g);
    const auto& sc = gc.scenario(pct);
    const auto model = icn::model_from_json(read_json_file((models / model_name(g, pct, dataset, kind)).string()));
    const auto iac = icn::IacModel::from_json(read_json_file((models / (file_stem(g, "iac") + ".json")).string()));
    const auto features = icn::dataset_features(campaign, dataset);
    const auto truth = icn::scenario_labels(sc.test, campaign, gc.profile, features, s);

    std::ostringstream csv;
    for (const auto& c : rc.provenance()) csv << "# " << c << '\n';
    csv << "ts,group,threshold_pass,iac_pass,verdict,truth\n";
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < sc.test.size(); ++i) {
      const auto v = icn::dual_detect(sc.test[i], sc.test.schema(), sc.test_events.slices.at(i), model, iac, s,
                                      rc.iac.alpha, rc.iac.sigma_th);
      const bool attack = truth[i] == icn::Label::Anomalous;
      const bool flagged = v.final == icn::Label::Anomalous;
      if (attack) (flagged ? tp : fn)++;
      else (flagged ? fp : tn)++;
      csv << sc.test[i].timestamp << ',' << icn::to_string(g) << ',' << v.threshold_pass << ',' << v.iac_pass << ','
          << (flagged ? "-1" : "+1") << ',' << (attack ? "-1" : "+1") << '\n';
    }
    const std::string stem = scenario_stem(g, pct, std::string(icn::to_string(dataset)).c_str()) + "_" +
                             std::string(icn::to_string(kind)) + ".detect.csv";
    write_text_file(out / stem, csv.str());
    const auto m = icn::metrics(tp, fp, tn, fn);
    std::printf("%s S=%d%% %s %s dual detection: ADR %.1f%%  FPR %.1f%%  SA %.1f%%\n",
                std::string(icn::to_string(g)).c_str(), pct, std::string(icn::to_string(dataset)).c_str(),
                std::string(icn::to_string(kind)).c_str(), m.adr, m.fpr, m.sa);
  }
  return kExitOk;
}

int cmd_select(const CommonFlags& f) {
  const RunConfig rc = resolve(f, (fs::path(f.data) / "config.json").string());
  const auto groups = parse_groups(f.groups);
  const int pct = parse_sensitivity(f.sensitivity);
  const auto kind = icn::parse_classifier(f.algo);
  if (f.method != "greedy" && f.method != "genetic" && f.method != "both")
    throw UsageError("--method must be greedy, genetic or both");
  const auto campaign = campaign_for(f, rc, groups);
  const fs::path out = f.out;
  fs::create_directories(out);

  ojson result = ojson::object();
  for (icn::Group g : groups) {
    const auto features = campaign.config.schema();
    const auto set = icn::pooled_scenario_set(campaign, g, pct, features);

    auto names = [&](const std::vector<std::size_t>& idx) {
      std::vector<std::string> out_names;
      for (auto i : idx) out_names.push_back(features[i]);
      return out_names;
    };
    ojson entry = ojson::object();
    if (f.method != "genetic") {
      const auto greedy = icn::greedy_select(set, kind, features.size(), rc.cv);
      entry["greedy"] = {{"features", names(greedy.indices)}, {"score", greedy.score}};
      std::cout << icn::to_string(g) << " greedy:";
      for (const auto& n : names(greedy.indices)) std::cout << ' ' << n;
      std::cout << "  (cv accuracy " << icn::format_double(greedy.score) << ")\n";
    }
    if (f.method != "greedy") {
      const auto ga = icn::genetic_select(set, kind, rc.ga, rc.cv);
      entry["genetic"] = {{"features", names(ga.best.indices)},
                          {"score", ga.best.score},
                          {"fitness", ga.best_fitness},
                          {"history", ga.best_fitness_history}};
      std::cout << icn::to_string(g) << " genetic:";
      for (const auto& n : names(ga.best.indices)) std::cout << ' ' << n;
      std::cout << "  (cv accuracy " << icn::format_double(ga.best.score) << ")\n";
    }
    result[std::string(icn::to_string(g))] = entry;
  }
  write_json_file(out / "selection.json", with_provenance(result, rc));
  return kExitOk;
}

int cmd_evaluate(const CommonFlags& f) {
  const RunConfig rc = resolve(f, (fs::path(f.data) / "config.json").string());
  const auto groups = parse_groups(f.groups);
  const auto campaign = campaign_for(f, rc, groups);
  icn::MatrixOptions opts;
  opts.groups = groups;
  opts.train = rc.train;
  const auto report = icn::run_matrix(campaign, opts);

  const fs::path out = f.out;
  fs::create_directories(out);
  const auto comment = rc.provenance();
  write_text_file(out / "report.csv", report.to_csv(comment));
  std::string text;
  for (const auto& c : comment) text += "# " + c + "\n";
  text += report.to_text();
  write_text_file(out / "report.txt", text);
  std::cout << report.to_text();

  const auto failures = icn::check_acceptance(report, rc.acceptance);
  for (const auto& msg : failures) std::cerr << "acceptance: " << msg << '\n';
  std::cout << report.rows.size() << " scenarios, " << failures.size() << " acceptance failures\n";
  return failures.empty() ? kExitOk : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anomaly detection for industrial control data: threshold profiles, inter-arrival curves and "
               "classifier evaluation"};
  app.require_subcommand(1);
  CommonFlags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config_path, "JSON run configuration");
    sub->add_option("--seed", f.seed, "master seed (overrides config and ICN_SENTINEL_SEED)");
    sub->add_option("--out", f.out, "output directory");
  };
  auto scenario = [&](CLI::App* sub) {
    sub->add_option("--data", f.data, "campaign directory written by gen (generated in memory when absent)");
    sub->add_option("--groups", f.groups, "comma-separated groups from MD,AD,ED,ND");
    sub->add_option("--sensitivity", f.sensitivity, "S% level: 20, 60 or 100");
    sub->add_option("--algo", f.algo, "classifier: svm, knn or c45");
  };
  auto iac = [&](CLI::App* sub) {
    sub->add_option("--alpha", f.alpha, "Mann-Whitney significance level");
    sub->add_option("--sigma-th", f.sigma_th, "deviation threshold for failed curves");
    sub->add_option("--w-delta", f.w_delta, "largest window size of the inter-arrival curves");
  };

  auto* gen = app.add_subcommand("gen", "generate a synthetic campaign");
  common(gen);

  auto* train = app.add_subcommand("train", "train classifier, threshold profile and IAC model");
  common(train);
  scenario(train);
  iac(train);
  train->add_option("--dataset", f.dataset, "feature view: full or reduced");

  auto* detect = app.add_subcommand("detect", "dual detection on a test partition");
  common(detect);
  scenario(detect);
  iac(detect);
  detect->add_option("--dataset", f.dataset, "feature view: full or reduced");
  detect->add_option("--models", f.models, "directory holding trained models (default: --out)");

  auto* select = app.add_subcommand("select", "wrapper feature selection");
  common(select);
  scenario(select);
  select->add_option("--method", f.method, "greedy, genetic or both");

  auto* evaluate = app.add_subcommand("evaluate", "run the scenario matrix and check acceptance");
  common(evaluate);
  scenario(evaluate);
  iac(evaluate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(f);
    if (*train) return cmd_train(f);
    if (*detect) return cmd_detect(f);
    if (*select) return cmd_select(f);
    if (*evaluate) return cmd_evaluate(f);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const icn::ArgumentError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const icn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
