#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>

#include "icn/classifiers.hpp"

namespace icn {

namespace {

double entropy(std::size_t a, std::size_t b) {
  const double n = static_cast<double>(a + b);
  if (n == 0.0) return 0.0;
  double h = 0.0;
  for (std::size_t c : {a, b}) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

Label majority(std::size_t normal, std::size_t anomalous) {
  return normal >= anomalous ? Label::Normal : Label::Anomalous;
}

struct FeatureSplit {
  bool found = false;
  double threshold = 0.0;
  double gain = 0.0;
  double ratio = 0.0;
};

struct Group {
  double value;
  std::size_t normal = 0;
  std::size_t anomalous = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(const LabeledSet& data, const C45Params& params, std::vector<TreeNode>& nodes)
      : data_(data), params_(params), nodes_(nodes) {}

  std::size_t grow(const std::vector<std::size_t>& idx) {
    std::size_t normal = 0;
    for (auto i : idx) normal += data_.label(i) == Label::Normal ? 1 : 0;
    const std::size_t anomalous = idx.size() - normal;

    const std::size_t id = nodes_.size();
    nodes_.push_back(TreeNode{true, majority(normal, anomalous), 0, 0.0, 0, 0, idx.size()});
    if (normal == 0 || anomalous == 0 || idx.size() < 2 * params_.min_leaf) return id;

    const double parent_h = entropy(normal, anomalous);
    std::vector<FeatureSplit> splits(data_.dim());
    std::size_t best = data_.dim();
    for (std::size_t f = 0; f < data_.dim(); ++f) {
      splits[f] = best_threshold(idx, f, parent_h);
      if (splits[f].found && (best == data_.dim() || splits[f].ratio > splits[best].ratio)) best = f;
    }
    if (best == data_.dim()) return id;

    std::vector<std::size_t> below;
    std::vector<std::size_t> above;
    for (auto i : idx) (data_.row(i)[best] <= splits[best].threshold ? below : above).push_back(i);

    const std::size_t lo = grow(below);
    const std::size_t hi = grow(above);
    auto& node = nodes_[id];
    node.leaf = false;
    node.feature = best;
    node.threshold = splits[best].threshold;
    node.below = lo;
    node.above = hi;
    return id;
  }

 private:
  FeatureSplit best_threshold(const std::vector<std::size_t>& idx, std::size_t f, double parent_h) const {
    std::vector<std::size_t> sorted = idx;
    std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
      return data_.row(a)[f] < data_.row(b)[f];
    });
    std::vector<Group> groups;
    for (auto i : sorted) {
      const double v = data_.row(i)[f];
      if (groups.empty() || groups.back().value != v) groups.push_back({v});
      (data_.label(i) == Label::Normal ? groups.back().normal : groups.back().anomalous)++;
    }

    const std::size_t n = idx.size();
    std::size_t total_normal = 0;
    for (const auto& g : groups) total_normal += g.normal;
    const std::size_t total_anomalous = n - total_normal;

    FeatureSplit best;
    std::size_t left_normal = 0;
    std::size_t left_anomalous = 0;
    for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
      left_normal += groups[g].normal;
      left_anomalous += groups[g].anomalous;
      const auto& a = groups[g];
      const auto& b = groups[g + 1];
      // Only boundaries between values of differing class can be optimal.
      const bool same_pure_class = (a.anomalous == 0 && b.anomalous == 0) || (a.normal == 0 && b.normal == 0);
      if (same_pure_class) continue;
      const std::size_t left = left_normal + left_anomalous;
      const std::size_t right = n - left;
      if (left < params_.min_leaf || right < params_.min_leaf) continue;

      const double pl = static_cast<double>(left) / static_cast<double>(n);
      const double pr = 1.0 - pl;
      const double child_h = pl * entropy(left_normal, left_anomalous) +
                             pr * entropy(total_normal - left_normal, total_anomalous - left_anomalous);
      const double gain = parent_h - child_h;
      if (!(gain > 1e-12) || gain <= best.gain) continue;
      const double split_info = entropy(left, right);
      best = {true, (a.value + b.value) / 2.0, gain, gain / split_info};
    }
    return best;
  }

  const LabeledSet& data_;
  const C45Params& params_;
  std::vector<TreeNode>& nodes_;
};

void collect_rules(const std::vector<TreeNode>& tree, std::size_t id, std::vector<Condition>& path,
                   std::vector<Rule>& out) {
  const auto& node = tree[id];
  if (node.leaf) {
    out.push_back(Rule{path, node.label, 0, 0});
    return;
  }
  path.push_back({node.feature, false, node.threshold});
  collect_rules(tree, node.below, path, out);
  path.back().greater = true;
  collect_rules(tree, node.above, path, out);
  path.pop_back();
}

void score(Rule& r, const LabeledSet& data) {
  r.covered = 0;
  r.errors = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!r.matches(data.row(i))) continue;
    ++r.covered;
    if (data.label(i) != r.label) ++r.errors;
  }
}

double rule_pessimism(const Rule& r, double cf) {
  return r.covered == 0 ? 1.0 : pessimistic_error_rate(r.errors, r.covered, cf);
}

/// Hill-climb: drop the condition whose removal lowers the pessimistic
/// error rate most, while some removal lowers it.
void simplify(Rule& rule, const LabeledSet& data, double cf) {
  score(rule, data);
  double current = rule_pessimism(rule, cf);
  while (!rule.conditions.empty()) {
    std::size_t best = rule.conditions.size();
    double best_err = current;
    for (std::size_t k = 0; k < rule.conditions.size(); ++k) {
      Rule trial = rule;
      trial.conditions.erase(trial.conditions.begin() + static_cast<std::ptrdiff_t>(k));
      score(trial, data);
      const double e = rule_pessimism(trial, cf);
      if (e < best_err) {
        best_err = e;
        best = k;
      }
    }
    if (best == rule.conditions.size()) break;
    rule.conditions.erase(rule.conditions.begin() + static_cast<std::ptrdiff_t>(best));
    score(rule, data);
    current = best_err;
  }
}

Label first_match(const std::vector<Rule>& rules, Label fallback, std::span<const double> x) {
  for (const auto& r : rules)
    if (r.matches(x)) return r.label;
  return fallback;
}

/// Majority class of the training cases no rule covers; all cases when every
/// case is covered. Ties go to the normal class.
Label default_class_for(const std::vector<Rule>& rules, const LabeledSet& data) {
  std::size_t un_normal = 0;
  std::size_t un_anomalous = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.row(i);
    if (std::any_of(rules.begin(), rules.end(), [&](const Rule& r) { return r.matches(x); })) continue;
    (data.label(i) == Label::Normal ? un_normal : un_anomalous)++;
  }
  if (un_normal + un_anomalous == 0) return majority(data.count(Label::Normal), data.count(Label::Anomalous));
  return majority(un_normal, un_anomalous);
}

std::size_t training_errors(const std::vector<Rule>& rules, const LabeledSet& data) {
  const Label def = default_class_for(rules, data);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (first_match(rules, def, data.row(i)) != data.label(i)) ++errors;
  return errors;
}

std::size_t depth_of(const std::vector<TreeNode>& tree, std::size_t id) {
  const auto& n = tree[id];
  if (n.leaf) return 0;
  return 1 + std::max(depth_of(tree, n.below), depth_of(tree, n.above));
}

}  // namespace

bool Rule::matches(std::span<const double> x) const {
  return std::all_of(conditions.begin(), conditions.end(), [&](const Condition& c) { return c.matches(x); });
}

std::size_t C45Model::depth() const { return tree.empty() ? 0 : depth_of(tree, 0); }

double pessimistic_error_rate(std::size_t errors, std::size_t cases, double cf) {
  if (cases == 0) throw ArgumentError("pessimistic error needs at least one case");
  if (!(cf > 0.0 && cf < 1.0)) throw ArgumentError("confidence factor must lie in (0, 1)");
  if (errors >= cases) return 1.0;
  // Largest p with P[X <= errors | cases, p] >= cf, i.e. I_p(e + 1, n - e) = 1 - cf.
  return boost::math::ibeta_inv(static_cast<double>(errors + 1), static_cast<double>(cases - errors), 1.0 - cf);
}

C45Model c45_train(const LabeledSet& data, const C45Params& params) {
  if (params.min_leaf == 0) throw ArgumentError("min_leaf must be >= 1");
  if (!(params.cf > 0.0 && params.cf < 1.0)) throw ArgumentError("confidence factor must lie in (0, 1)");
  if (!data.both_classes()) throw DegenerateDataError("C4.5 training needs both classes");

  C45Model model;
  model.dim = data.dim();
  model.standardization = data.standardization();
  model.features = data.names();

  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  TreeBuilder(data, params, model.tree).grow(all);

  // One prototype rule per root-to-leaf path, each simplified on its own.
  std::vector<Rule> rules;
  std::vector<Condition> path;
  collect_rules(model.tree, 0, path, rules);
  for (auto& r : rules) simplify(r, data, params.cf);

  std::vector<Rule> unique;
  for (auto& r : rules) {
    const bool dup = std::any_of(unique.begin(), unique.end(), [&](const Rule& u) {
      return u.label == r.label && u.conditions == r.conditions;
    });
    if (!dup) unique.push_back(std::move(r));
  }

  // Ascending training error rate; anomaly rules first, then wider coverage.
  std::stable_sort(unique.begin(), unique.end(), [](const Rule& a, const Rule& b) {
    const double ea = static_cast<double>(a.errors) / static_cast<double>(std::max<std::size_t>(a.covered, 1));
    const double eb = static_cast<double>(b.errors) / static_cast<double>(std::max<std::size_t>(b.covered, 1));
    if (ea != eb) return ea < eb;
    if (a.label != b.label) return a.label == Label::Anomalous;
    return a.covered > b.covered;
  });

  // Drop rules, last first, while training error does not grow; the default
  // class absorbs what they covered.
  std::size_t current = training_errors(unique, data);
  bool changed = true;
  while (changed && !unique.empty()) {
    changed = false;
    for (std::size_t k = unique.size(); k-- > 0;) {
      std::vector<Rule> trial = unique;
      trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(k));
      const std::size_t e = training_errors(trial, data);
      if (e <= current) {
        unique = std::move(trial);
        current = e;
        changed = true;
        break;
      }
    }
  }

  model.default_class = default_class_for(unique, data);
  model.rules = std::move(unique);
  return model;
}

Label c45_predict(const C45Model& model, std::span<const double> x) {
  if (x.size() != model.dim)
    throw ArgumentError("expected " + std::to_string(model.dim) + " features, got " + std::to_string(x.size()));
  return first_match(model.rules, model.default_class, x);
}

Label c45_tree_predict(const C45Model& model, std::span<const double> x) {
  if (x.size() != model.dim)
    throw ArgumentError("expected " + std::to_string(model.dim) + " features, got " + std::to_string(x.size()));
  std::size_t id = 0;
  while (!model.tree.at(id).leaf) {
    const auto& n = model.tree[id];
    id = x[n.feature] <= n.threshold ? n.below : n.above;
  }
  return model.tree[id].label;
}

}  // namespace icn
