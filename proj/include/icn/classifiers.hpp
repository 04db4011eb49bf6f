#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "icn/core.hpp"

namespace icn {

/// Per-feature z-score transform. Constant features get unit scale.
struct Standardization {
  std::vector<double> mean;
  std::vector<double> scale;

  [[nodiscard]] std::vector<double> apply(std::span<const double> x) const;
  [[nodiscard]] std::size_t dim() const noexcept { return mean.size(); }
};

/// Feature vectors with +1/-1 labels; the standardization is fitted on x at
/// construction.
class LabeledSet {
 public:
  LabeledSet(std::size_t dim, std::vector<double> flat_x, std::vector<Label> y, std::vector<std::string> names = {});
  static LabeledSet from_rows(const std::vector<std::vector<double>>& rows, std::vector<Label> y,
                              std::vector<std::string> names = {});
  /// Uses the row labels of `trace`; every row must be labeled.
  static LabeledSet from_trace(const DataTrace& trace, std::span<const std::string> features);
  static LabeledSet from_trace(const DataTrace& trace, std::span<const std::string> features,
                               std::span<const Label> labels);

  [[nodiscard]] std::size_t size() const noexcept { return y_.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const { return {x_.data() + i * dim_, dim_}; }
  [[nodiscard]] Label label(std::size_t i) const { return y_.at(i); }
  [[nodiscard]] const std::vector<Label>& labels() const noexcept { return y_; }
  [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
  [[nodiscard]] const Standardization& standardization() const noexcept { return std_; }
  [[nodiscard]] bool both_classes() const noexcept;
  [[nodiscard]] std::size_t count(Label l) const noexcept;

  [[nodiscard]] LabeledSet subset(std::span<const std::size_t> rows) const;
  [[nodiscard]] LabeledSet select_features(std::span<const std::size_t> features) const;

 private:
  std::size_t dim_;
  std::vector<double> x_;
  std::vector<Label> y_;
  std::vector<std::string> names_;
  Standardization std_;
};

enum class ClassifierKind { Svm, Knn, C45 };

inline constexpr std::array<ClassifierKind, 3> kAllClassifiers{ClassifierKind::Svm, ClassifierKind::Knn,
                                                               ClassifierKind::C45};

[[nodiscard]] std::string_view to_string(ClassifierKind k) noexcept;
[[nodiscard]] ClassifierKind parse_classifier(std::string_view s);

// ---------------------------------------------------------------------------
// Linear soft-margin SVM

struct SvmParams {
  double c_param = 1.0;
  std::size_t epochs = 200;
  std::uint64_t seed = 1;
};

/// Hyperplane on standardized inputs: f(x) = sign(w . z(x) + b).
struct SvmModel {
  std::vector<double> weights;
  double bias = 0.0;
  double c_param = 1.0;
  Standardization standardization;
  std::vector<std::string> features;
};

[[nodiscard]] SvmModel svm_train(const LabeledSet& data, const SvmParams& params = {});
/// +1 when w . z + b >= 0.
[[nodiscard]] Label svm_predict(const SvmModel& model, std::span<const double> x);
/// 0.5 |w|^2 + C * sum of hinge losses over `data` (standardized with the model's transform).
[[nodiscard]] double svm_objective(const SvmModel& model, const LabeledSet& data);

// ---------------------------------------------------------------------------
// k-nearest neighbour

enum class Metric { Euclidean, Manhattan };

struct KnnParams {
  std::size_t k = 1;
  Metric metric = Metric::Euclidean;
};

struct KnnModel {
  std::size_t dim = 0;
  std::vector<double> points;  ///< standardized, row-major
  std::vector<Label> labels;
  std::size_t k = 1;
  Metric metric = Metric::Euclidean;
  Standardization standardization;
  std::vector<std::string> features;
};

[[nodiscard]] KnnModel knn_train(const LabeledSet& data, const KnnParams& params = {});
/// Majority label of the k nearest stored points; distance ties go to the
/// lowest stored index, vote ties to +1.
[[nodiscard]] Label knn_predict(const KnnModel& model, std::span<const double> x);

// ---------------------------------------------------------------------------
// C4.5 with rule extraction

struct C45Params {
  std::size_t min_leaf = 2;
  double cf = 0.25;
};

struct Condition {
  std::size_t feature = 0;
  bool greater = false;  ///< x[feature] > threshold, otherwise x[feature] <= threshold
  double threshold = 0.0;

  [[nodiscard]] bool matches(std::span<const double> x) const { return greater ? x[feature] > threshold : x[feature] <= threshold; }
  friend bool operator==(const Condition&, const Condition&) = default;
};

struct Rule {
  std::vector<Condition> conditions;
  Label label = Label::Normal;
  std::size_t covered = 0;  ///< training cases matched
  std::size_t errors = 0;   ///< matched cases of the other class

  [[nodiscard]] bool matches(std::span<const double> x) const;
};

struct TreeNode {
  bool leaf = true;
  Label label = Label::Normal;
  std::size_t feature = 0;
  double threshold = 0.0;
  std::size_t below = 0;  ///< child index for x <= threshold
  std::size_t above = 0;  ///< child index for x > threshold
  std::size_t cases = 0;
};

struct C45Model {
  std::size_t dim = 0;
  std::vector<TreeNode> tree;  ///< root at index 0
  std::vector<Rule> rules;     ///< first match wins
  Label default_class = Label::Normal;
  Standardization standardization;
  std::vector<std::string> features;

  [[nodiscard]] std::size_t depth() const;
};

/// Upper limit of the binomial confidence interval for `errors` out of
/// `cases` at confidence `cf` (C4.5's pessimistic error rate).
[[nodiscard]] double pessimistic_error_rate(std::size_t errors, std::size_t cases, double cf);

[[nodiscard]] C45Model c45_train(const LabeledSet& data, const C45Params& params = {});
[[nodiscard]] Label c45_predict(const C45Model& model, std::span<const double> x);
/// Prediction by walking the unpruned tree.
[[nodiscard]] Label c45_tree_predict(const C45Model& model, std::span<const double> x);

// ---------------------------------------------------------------------------
// Common contract

using Model = std::variant<SvmModel, KnnModel, C45Model>;

struct TrainOptions {
  SvmParams svm;
  KnnParams knn;
  C45Params c45;
};

[[nodiscard]] Model train_model(ClassifierKind kind, const LabeledSet& data, const TrainOptions& options = {});
[[nodiscard]] Label predict(const Model& model, std::span<const double> x);
[[nodiscard]] ClassifierKind kind_of(const Model& model) noexcept;
[[nodiscard]] const std::vector<std::string>& features_of(const Model& model) noexcept;
/// Fraction of `data` predicted correctly.
[[nodiscard]] double accuracy(const Model& model, const LabeledSet& data);

[[nodiscard]] nlohmann::ordered_json model_to_json(const Model& model);
[[nodiscard]] Model model_from_json(const nlohmann::ordered_json& j);

}  // namespace icn
