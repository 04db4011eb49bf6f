#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "icn/classifiers.hpp"

namespace icn {

/// Feature positions (ascending) and their cross-validated accuracy.
struct FeatureSubset {
  std::vector<std::size_t> indices;
  double score = 0.0;
};

struct CvOptions {
  std::size_t folds = 5;
  std::uint64_t seed = 7;
  TrainOptions train;
};

/// Stratified k-fold accuracy of `kind` trained on the given feature columns.
/// A training fold holding one class predicts that class.
[[nodiscard]] double cross_validated_accuracy(const LabeledSet& data, ClassifierKind kind,
                                              std::span<const std::size_t> features, const CvOptions& cv = {});

/// Forward selection: add the feature that most raises CV accuracy (lowest
/// index on ties) until nothing improves or max_features is reached.
[[nodiscard]] FeatureSubset greedy_select(const LabeledSet& data, ClassifierKind kind, std::size_t max_features,
                                          const CvOptions& cv = {});

inline constexpr std::size_t kExhaustiveFeatureLimit = 12;

/// Best CV accuracy over every non-empty subset of at most max_features
/// features; ties prefer fewer features, then lexicographically smaller sets.
[[nodiscard]] FeatureSubset exhaustive_select(const LabeledSet& data, ClassifierKind kind,
                                              std::size_t max_features, const CvOptions& cv = {});

/// Exhaustive search up to kExhaustiveFeatureLimit features, greedy above.
[[nodiscard]] FeatureSubset search_select(const LabeledSet& data, ClassifierKind kind, std::size_t max_features,
                                          const CvOptions& cv = {});

struct GaConfig {
  std::size_t population = 30;
  std::size_t generations = 40;
  double crossover_rate = 0.9;
  double mutation_rate = 0.05;
  std::uint64_t seed = 11;
  double parsimony = 0.002;  ///< fitness penalty per selected feature
  std::size_t tournament = 3;
  /// Optional starting chromosomes; the rest of the population is random.
  std::vector<std::vector<bool>> initial;
};

struct GaResult {
  FeatureSubset best;
  double best_fitness = 0.0;
  std::vector<double> best_fitness_history;  ///< best-ever fitness after each generation
};

/// Bitmask genetic search with tournament selection, uniform crossover and
/// per-bit mutation. Fitness is CV accuracy minus parsimony * |subset|.
[[nodiscard]] GaResult genetic_select(const LabeledSet& data, ClassifierKind kind, const GaConfig& config,
                                      const CvOptions& cv = {});

}  // namespace icn
