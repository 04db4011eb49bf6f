#include <algorithm>
#include <cmath>
#include <numeric>

#include "icn/classifiers.hpp"

namespace icn {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double objective(std::span<const double> w, double b, double c, const std::vector<std::vector<double>>& z,
                 const std::vector<double>& y) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) hinge += std::max(0.0, 1.0 - y[i] * (dot(w, z[i]) + b));
  return 0.5 * dot(w, w) + c * hinge;
}

}  // namespace

// Pegasos-style stochastic subgradient descent on
//   lambda/2 |(w, b)|^2 + 1/l * sum hinge,  lambda = 1 / (C l),
// which is the soft-margin objective divided by C l (the bias joins the
// regulariser as a constant feature). Each epoch visits the samples in a
// seed-shuffled order; the returned model is the epoch-end iterate with the
// lowest soft-margin objective, starting from w = 0.
SvmModel svm_train(const LabeledSet& data, const SvmParams& params) {
  if (!(params.c_param > 0.0)) throw ArgumentError("SVM C parameter must be > 0");
  if (!data.both_classes()) throw DegenerateDataError("SVM training needs both classes");

  const std::size_t l = data.size();
  const std::size_t n = data.dim();
  std::vector<std::vector<double>> z(l);
  std::vector<double> y(l);
  for (std::size_t i = 0; i < l; ++i) {
    z[i] = data.standardization().apply(data.row(i));
    y[i] = static_cast<double>(to_int(data.label(i)));
  }

  const double lambda = 1.0 / (params.c_param * static_cast<double>(l));
  std::vector<double> w(n, 0.0);
  double b = 0.0;

  std::vector<double> best_w = w;
  double best_b = b;
  double best_obj = objective(w, b, params.c_param, z, y);

  std::vector<std::size_t> order(l);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(params.seed);
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double margin = y[i] * (dot(w, z[i]) + b);
      const double shrink = 1.0 - eta * lambda;
      for (auto& wj : w) wj *= shrink;
      b *= shrink;
      if (margin < 1.0) {
        for (std::size_t j = 0; j < n; ++j) w[j] += eta * y[i] * z[i][j];
        b += eta * y[i];
      }
      // projection onto the ball that contains the optimum
      const double norm2 = dot(w, w) + b * b;
      const double radius2 = 1.0 / lambda;
      if (norm2 > radius2) {
        const double s = std::sqrt(radius2 / norm2);
        for (auto& wj : w) wj *= s;
        b *= s;
      }
    }
    const double obj = objective(w, b, params.c_param, z, y);
    if (obj < best_obj) {
      best_obj = obj;
      best_w = w;
      best_b = b;
    }
  }

  return SvmModel{std::move(best_w), best_b, params.c_param, data.standardization(), data.names()};
}

Label svm_predict(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.weights.size())
    throw ArgumentError("expected " + std::to_string(model.weights.size()) + " features, got " +
                        std::to_string(x.size()));
  const auto z = model.standardization.dim() == x.size() ? model.standardization.apply(x)
                                                         : std::vector<double>(x.begin(), x.end());
  return dot(model.weights, z) + model.bias >= 0.0 ? Label::Normal : Label::Anomalous;
}

double svm_objective(const SvmModel& model, const LabeledSet& data) {
  std::vector<std::vector<double>> z(data.size());
  std::vector<double> y(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    z[i] = model.standardization.apply(data.row(i));
    y[i] = static_cast<double>(to_int(data.label(i)));
  }
  return objective(model.weights, model.bias, model.c_param, z, y);
}

}  // namespace icn
