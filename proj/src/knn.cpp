#include <algorithm>
#include <cmath>
#include <numeric>

#include "icn/classifiers.hpp"

namespace icn {

KnnModel knn_train(const LabeledSet& data, const KnnParams& params) {
  if (params.k == 0 || params.k > data.size()) throw ArgumentError("k must lie in [1, training set size]");
  KnnModel m;
  m.dim = data.dim();
  m.k = params.k;
  m.metric = params.metric;
  m.standardization = data.standardization();
  m.features = data.names();
  m.labels = data.labels();
  m.points.reserve(data.size() * data.dim());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto z = data.standardization().apply(data.row(i));
    m.points.insert(m.points.end(), z.begin(), z.end());
  }
  return m;
}

Label knn_predict(const KnnModel& model, std::span<const double> x) {
  if (model.labels.empty()) throw ArgumentError("k-NN model holds no points");
  if (x.size() != model.dim)
    throw ArgumentError("expected " + std::to_string(model.dim) + " features, got " + std::to_string(x.size()));
  const auto z = model.standardization.dim() == x.size() ? model.standardization.apply(x)
                                                         : std::vector<double>(x.begin(), x.end());
  const std::size_t n = model.labels.size();
  std::vector<double> dist(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = model.points.data() + i * model.dim;
    double d = 0.0;
    for (std::size_t j = 0; j < model.dim; ++j) {
      const double diff = z[j] - p[j];
      d += model.metric == Metric::Euclidean ? diff * diff : std::abs(diff);
    }
    dist[i] = d;  // squared for Euclidean; ordering is the same
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t k = std::min(model.k, n);
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });
  int vote = 0;
  for (std::size_t i = 0; i < k; ++i) vote += to_int(model.labels[idx[i]]);
  return vote >= 0 ? Label::Normal : Label::Anomalous;
}

}  // namespace icn
