#include <algorithm>
#include <cmath>

#include "icn/classifiers.hpp"

namespace icn {

std::vector<double> Standardization::apply(std::span<const double> x) const {
  if (x.size() != mean.size())
    throw ArgumentError("expected " + std::to_string(mean.size()) + " features, got " + std::to_string(x.size()));
  std::vector<double> z(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - mean[j]) / scale[j];
  return z;
}

LabeledSet::LabeledSet(std::size_t dim, std::vector<double> flat_x, std::vector<Label> y,
                       std::vector<std::string> names)
    : dim_(dim), x_(std::move(flat_x)), y_(std::move(y)), names_(std::move(names)) {
  if (dim_ == 0) throw ArgumentError("feature vectors must have at least one dimension");
  if (y_.empty()) throw ArgumentError("labeled set must not be empty");
  if (x_.size() != y_.size() * dim_) throw ArgumentError("feature matrix does not match label count");
  if (names_.empty())
    for (std::size_t j = 0; j < dim_; ++j) names_.push_back("f" + std::to_string(j));
  if (names_.size() != dim_) throw ArgumentError("feature name count does not match dimension");

  const double n = static_cast<double>(y_.size());
  std_.mean.assign(dim_, 0.0);
  std_.scale.assign(dim_, 0.0);
  for (std::size_t i = 0; i < y_.size(); ++i)
    for (std::size_t j = 0; j < dim_; ++j) std_.mean[j] += x_[i * dim_ + j];
  for (auto& m : std_.mean) m /= n;
  for (std::size_t i = 0; i < y_.size(); ++i)
    for (std::size_t j = 0; j < dim_; ++j) {
      const double d = x_[i * dim_ + j] - std_.mean[j];
      std_.scale[j] += d * d;
    }
  for (auto& s : std_.scale) {
    s = std::sqrt(s / n);
    if (!(s > 1e-12)) s = 1.0;
  }
}

LabeledSet LabeledSet::from_rows(const std::vector<std::vector<double>>& rows, std::vector<Label> y,
                                 std::vector<std::string> names) {
  if (rows.empty()) throw ArgumentError("labeled set must not be empty");
  const std::size_t dim = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw ArgumentError("all feature vectors must share one dimension");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return LabeledSet(dim, std::move(flat), std::move(y), std::move(names));
}

LabeledSet LabeledSet::from_trace(const DataTrace& trace, std::span<const std::string> features) {
  std::vector<Label> labels;
  labels.reserve(trace.size());
  for (const auto& r : trace.rows()) {
    if (!r.label) throw ArgumentError("data trace is not fully labeled");
    labels.push_back(*r.label);
  }
  return from_trace(trace, features, labels);
}

LabeledSet LabeledSet::from_trace(const DataTrace& trace, std::span<const std::string> features,
                                  std::span<const Label> labels) {
  if (labels.size() != trace.size()) throw ArgumentError("label count does not match trace length");
  std::vector<std::size_t> cols;
  for (const auto& f : features) cols.push_back(trace.index_of(f));
  std::vector<double> flat;
  flat.reserve(trace.size() * cols.size());
  for (const auto& r : trace.rows())
    for (auto c : cols) flat.push_back(r.values[c]);
  return LabeledSet(cols.size(), std::move(flat), {labels.begin(), labels.end()},
                    {features.begin(), features.end()});
}

bool LabeledSet::both_classes() const noexcept {
  return count(Label::Normal) > 0 && count(Label::Anomalous) > 0;
}

std::size_t LabeledSet::count(Label l) const noexcept {
  return static_cast<std::size_t>(std::count(y_.begin(), y_.end(), l));
}

LabeledSet LabeledSet::subset(std::span<const std::size_t> rows) const {
  std::vector<double> flat;
  std::vector<Label> y;
  flat.reserve(rows.size() * dim_);
  for (auto i : rows) {
    const auto r = row(i);
    flat.insert(flat.end(), r.begin(), r.end());
    y.push_back(y_.at(i));
  }
  return LabeledSet(dim_, std::move(flat), std::move(y), names_);
}

LabeledSet LabeledSet::select_features(std::span<const std::size_t> features) const {
  if (features.empty()) throw ArgumentError("feature subset must not be empty");
  std::vector<double> flat;
  flat.reserve(size() * features.size());
  for (std::size_t i = 0; i < size(); ++i)
    for (auto f : features) flat.push_back(x_[i * dim_ + f]);
  std::vector<std::string> names;
  for (auto f : features) names.push_back(names_.at(f));
  return LabeledSet(features.size(), std::move(flat), y_, std::move(names));
}

std::string_view to_string(ClassifierKind k) noexcept {
  switch (k) {
    case ClassifierKind::Svm: return "svm";
    case ClassifierKind::Knn: return "knn";
    case ClassifierKind::C45: return "c45";
  }
  return "?";
}

ClassifierKind parse_classifier(std::string_view s) {
  for (auto k : kAllClassifiers)
    if (to_string(k) == s) return k;
  throw ArgumentError("unknown classifier '" + std::string(s) + "' (expected svm, knn or c45)");
}

}  // namespace icn
