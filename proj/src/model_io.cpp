#include <algorithm>

#include "icn/classifiers.hpp"

namespace icn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using ojson = nlohmann::ordered_json;

ojson standardization_json(const Standardization& s) { return {{"mean", s.mean}, {"scale", s.scale}}; }

Standardization standardization_from(const ojson& j) {
  Standardization s{j.at("mean").get<std::vector<double>>(), j.at("scale").get<std::vector<double>>()};
  if (s.mean.size() != s.scale.size()) throw SchemaError("standardization mean/scale size mismatch");
  return s;
}

std::vector<int> labels_json(const std::vector<Label>& labels) {
  std::vector<int> out;
  for (auto l : labels) out.push_back(to_int(l));
  return out;
}

}  // namespace

Model train_model(ClassifierKind kind, const LabeledSet& data, const TrainOptions& options) {
  switch (kind) {
    case ClassifierKind::Svm: return svm_train(data, options.svm);
    case ClassifierKind::Knn: return knn_train(data, options.knn);
    case ClassifierKind::C45: return c45_train(data, options.c45);
  }
  throw ArgumentError("unknown classifier kind");
}

Label predict(const Model& model, std::span<const double> x) {
  return std::visit(overloaded{[&](const SvmModel& m) { return svm_predict(m, x); },
                               [&](const KnnModel& m) { return knn_predict(m, x); },
                               [&](const C45Model& m) { return c45_predict(m, x); }},
                    model);
}

ClassifierKind kind_of(const Model& model) noexcept {
  return std::visit(overloaded{[](const SvmModel&) { return ClassifierKind::Svm; },
                               [](const KnnModel&) { return ClassifierKind::Knn; },
                               [](const C45Model&) { return ClassifierKind::C45; }},
                    model);
}

const std::vector<std::string>& features_of(const Model& model) noexcept {
  return std::visit([](const auto& m) -> const std::vector<std::string>& { return m.features; }, model);
}

double accuracy(const Model& model, const LabeledSet& data) {
  std::size_t right = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (predict(model, data.row(i)) == data.label(i)) ++right;
  return static_cast<double>(right) / static_cast<double>(data.size());
}

ojson model_to_json(const Model& model) {
  return std::visit(
      overloaded{
          [](const SvmModel& m) -> ojson {
            return {{"kind", "svm"},
                    {"features", m.features},
                    {"weights", m.weights},
                    {"bias", m.bias},
                    {"c_param", m.c_param},
                    {"standardization", standardization_json(m.standardization)}};
          },
          [](const KnnModel& m) -> ojson {
            ojson points = ojson::array();
            for (std::size_t i = 0; i < m.labels.size(); ++i)
              points.push_back(std::vector<double>(m.points.begin() + static_cast<std::ptrdiff_t>(i * m.dim),
                                                   m.points.begin() + static_cast<std::ptrdiff_t>((i + 1) * m.dim)));
            return {{"kind", "knn"},
                    {"features", m.features},
                    {"k", m.k},
                    {"metric", m.metric == Metric::Euclidean ? "euclidean" : "manhattan"},
                    {"points", std::move(points)},
                    {"labels", labels_json(m.labels)},
                    {"standardization", standardization_json(m.standardization)}};
          },
          [](const C45Model& m) -> ojson {
            ojson rules = ojson::array();
            for (const auto& r : m.rules) {
              ojson conds = ojson::array();
              for (const auto& c : r.conditions)
                conds.push_back({{"feature", m.features.at(c.feature)},
                                 {"op", c.greater ? ">" : "<="},
                                 {"threshold", c.threshold}});
              rules.push_back({{"conditions", std::move(conds)},
                               {"label", to_int(r.label)},
                               {"covered", r.covered},
                               {"errors", r.errors}});
            }
            return {{"kind", "c45"},
                    {"features", m.features},
                    {"rules", std::move(rules)},
                    {"default_class", to_int(m.default_class)},
                    {"standardization", standardization_json(m.standardization)}};
          }},
      model);
}

Model model_from_json(const ojson& j) {
  try {
    const auto kind = parse_classifier(j.at("kind").get<std::string>());
    const auto features = j.at("features").get<std::vector<std::string>>();
    const auto stdz = standardization_from(j.at("standardization"));
    switch (kind) {
      case ClassifierKind::Svm: {
        SvmModel m{j.at("weights").get<std::vector<double>>(), j.at("bias").get<double>(),
                   j.at("c_param").get<double>(), stdz, features};
        if (m.weights.size() != features.size()) throw SchemaError("SVM weight count does not match features");
        return m;
      }
      case ClassifierKind::Knn: {
        KnnModel m;
        m.dim = features.size();
        m.k = j.at("k").get<std::size_t>();
        const auto metric = j.at("metric").get<std::string>();
        if (metric != "euclidean" && metric != "manhattan") throw SchemaError("unknown metric '" + metric + "'");
        m.metric = metric == "euclidean" ? Metric::Euclidean : Metric::Manhattan;
        for (const auto& p : j.at("points")) {
          const auto v = p.get<std::vector<double>>();
          if (v.size() != m.dim) throw SchemaError("k-NN point dimension does not match features");
          m.points.insert(m.points.end(), v.begin(), v.end());
        }
        for (int l : j.at("labels").get<std::vector<int>>()) m.labels.push_back(label_from_int(l));
        if (m.labels.size() * m.dim != m.points.size()) throw SchemaError("k-NN label count does not match points");
        m.standardization = stdz;
        m.features = features;
        return m;
      }
      case ClassifierKind::C45: {
        C45Model m;
        m.dim = features.size();
        m.features = features;
        m.standardization = stdz;
        m.default_class = label_from_int(j.at("default_class").get<int>());
        for (const auto& r : j.at("rules")) {
          Rule rule;
          rule.label = label_from_int(r.at("label").get<int>());
          rule.covered = r.value("covered", std::size_t{0});
          rule.errors = r.value("errors", std::size_t{0});
          for (const auto& c : r.at("conditions")) {
            const auto name = c.at("feature").get<std::string>();
            auto it = std::find(features.begin(), features.end(), name);
            if (it == features.end()) throw SchemaError("rule references unknown feature '" + name + "'");
            const auto op = c.at("op").get<std::string>();
            if (op != ">" && op != "<=") throw SchemaError("unknown rule operator '" + op + "'");
            rule.conditions.push_back(
                {static_cast<std::size_t>(it - features.begin()), op == ">", c.at("threshold").get<double>()});
          }
          m.rules.push_back(std::move(rule));
        }
        return m;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed model file: ") + e.what());
  } catch (const ArgumentError& e) {
    throw SchemaError(std::string("malformed model file: ") + e.what());
  }
  throw SchemaError("unknown model kind");
}

}  // namespace icn
