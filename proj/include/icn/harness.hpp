#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "icn/classifiers.hpp"
#include "icn/iac.hpp"
#include "icn/profiler.hpp"
#include "icn/synth.hpp"

namespace icn {

enum class DatasetKind { Full, Reduced };

inline constexpr std::array<DatasetKind, 2> kAllDatasets{DatasetKind::Full, DatasetKind::Reduced};

[[nodiscard]] std::string_view to_string(DatasetKind k) noexcept;
[[nodiscard]] DatasetKind parse_dataset_kind(std::string_view s);

/// -1 when at least s.required_count(|features|) of `features` exceed their
/// thresholds, +1 otherwise.
[[nodiscard]] Label label_ground_truth(const DataRow& row, std::span<const std::string> schema,
                                       const ThresholdProfile& profile, std::span<const std::string> features,
                                       SensitivityDegree s);

struct Metrics {
  double adr = 0.0;  ///< detected attacks / attacks, percent
  double fpr = 0.0;  ///< normals flagged / normals, percent
  double sa = 0.0;   ///< correct / all, percent
};

/// Throws UndefinedMetricError when there are no attacks or no normals.
[[nodiscard]] Metrics metrics(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn);

struct DualVerdict {
  bool threshold_pass = true;
  bool iac_pass = true;
  Label final = Label::Normal;
};

/// Normal only when the classifier says +1 for the row and the IAC test finds
/// the aligned event window normal.
[[nodiscard]] DualVerdict dual_detect(const DataRow& row, std::span<const std::string> schema,
                                      const EventTrace& window, const Model& classifier, const IacModel& iac,
                                      SensitivityDegree s, double alpha, double sigma_th);

/// Frequency share used to pick IAC feature events from generated traces; the
/// default schedule puts the five signal parameters at about 43%.
inline constexpr double kDefaultSignificancePct = 40.0;

/// IAC model trained on the per-row event slices of a group's normal history.
[[nodiscard]] IacModel train_group_iac(const GroupCampaign& group, const IacConfig& config = {},
                                       double significance_pct = kDefaultSignificancePct);

struct ScenarioResult {
  Group group = Group::MD;
  DatasetKind dataset = DatasetKind::Full;
  int s_pct = 20;
  ClassifierKind classifier = ClassifierKind::Svm;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double adr = 0.0, fpr = 0.0, sa = 0.0;
};

struct AverageResult {
  ClassifierKind classifier = ClassifierKind::Svm;
  DatasetKind dataset = DatasetKind::Full;
  int s_pct = 20;
  double adr = 0.0, fpr = 0.0, sa = 0.0;
};

struct EvaluationReport {
  std::vector<ScenarioResult> rows;      ///< canonical order: group, dataset, S%, classifier
  std::vector<AverageResult> averages;  ///< mean over groups per classifier, dataset and S%

  [[nodiscard]] const ScenarioResult& find(Group g, DatasetKind d, int s_pct, ClassifierKind c) const;
  [[nodiscard]] const AverageResult& average(ClassifierKind c, DatasetKind d, int s_pct) const;
  [[nodiscard]] std::string to_csv(std::span<const std::string> comment = {}) const;
  /// One block per classifier and S%, groups side by side as full/reduced columns.
  [[nodiscard]] std::string to_text() const;
};

struct MatrixOptions {
  std::vector<Group> groups{kAllGroups.begin(), kAllGroups.end()};
  std::vector<DatasetKind> datasets{kAllDatasets.begin(), kAllDatasets.end()};
  std::vector<int> levels{kSensitivityLevels.begin(), kSensitivityLevels.end()};
  std::vector<ClassifierKind> classifiers{kAllClassifiers.begin(), kAllClassifiers.end()};
  TrainOptions train;
  /// Reduced view; empty means the campaign's signal parameters.
  std::vector<std::string> reduced_features;
};

/// Feature names of `kind` for the campaign.
[[nodiscard]] std::vector<std::string> dataset_features(const Campaign& campaign, DatasetKind kind,
                                                        const std::vector<std::string>& reduced = {});

/// Ground-truth labels for every row of `trace`, counting only the signal
/// parameters that are present in `features`.
[[nodiscard]] std::vector<Label> scenario_labels(const DataTrace& trace, const Campaign& campaign,
                                                 const ThresholdProfile& profile,
                                                 std::span<const std::string> features, SensitivityDegree s);

/// Train and test rows of one scenario pooled into a single labeled set over
/// `features`; the input to wrapper feature selection.
[[nodiscard]] LabeledSet pooled_scenario_set(const Campaign& campaign, Group group, int s_pct,
                                             std::span<const std::string> features);

/// Classifier-only evaluation of every requested cell.
[[nodiscard]] EvaluationReport run_matrix(const Campaign& campaign, const MatrixOptions& options = {});

/// One acceptance requirement; unset filters match every row.
struct AcceptanceRule {
  std::optional<DatasetKind> dataset;
  std::optional<int> s_pct;
  std::optional<ClassifierKind> classifier;
  double min_adr = 0.0;
  double max_fpr = 100.0;
  double min_sa = 0.0;

  static AcceptanceRule from_json(const nlohmann::ordered_json& j);
  [[nodiscard]] nlohmann::ordered_json to_json() const;
};

/// Human-readable description of every violated rule; empty when all hold.
[[nodiscard]] std::vector<std::string> check_acceptance(const EvaluationReport& report,
                                                        std::span<const AcceptanceRule> rules);

}  // namespace icn
