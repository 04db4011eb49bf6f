#include "icn/featsel.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

namespace icn {

namespace {

void require_trainable(const LabeledSet& data) {
  if (data.size() < 2 || !data.both_classes())
    throw ArgumentError("feature selection needs labeled data with both classes");
}

// Stratified fold index per row: each class is shuffled and dealt round-robin.
std::vector<std::size_t> assign_folds(const LabeledSet& data, std::size_t folds, std::uint64_t seed) {
  std::vector<std::size_t> fold(data.size(), 0);
  std::size_t next = 0;
  for (Label cls : {Label::Anomalous, Label::Normal}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.size(); ++i)
      if (data.label(i) == cls) members.push_back(i);
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(to_int(cls) + 2)));
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i : members) fold[i] = next++ % folds;
  }
  return fold;
}

std::vector<std::size_t> to_indices(const std::vector<bool>& mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(i);
  return out;
}

}  // namespace

double cross_validated_accuracy(const LabeledSet& data, ClassifierKind kind, std::span<const std::size_t> features,
                                const CvOptions& cv) {
  require_trainable(data);
  if (features.empty()) throw ArgumentError("feature subset is empty");
  if (cv.folds < 2) throw ArgumentError("cross-validation needs at least 2 folds");
  for (std::size_t f : features)
    if (f >= data.dim()) throw ArgumentError("feature index " + std::to_string(f) + " out of range");

  const LabeledSet view = data.select_features(features);
  const auto fold = assign_folds(view, cv.folds, cv.seed);
  std::size_t right = 0;
  for (std::size_t k = 0; k < cv.folds; ++k) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < view.size(); ++i) (fold[i] == k ? test_rows : train_rows).push_back(i);
    if (test_rows.empty() || train_rows.empty()) continue;
    const LabeledSet train = view.subset(train_rows);
    if (!train.both_classes()) {
      const Label only = train.label(0);
      for (std::size_t i : test_rows)
        if (view.label(i) == only) ++right;
      continue;
    }
    TrainOptions opts = cv.train;
    opts.knn.k = std::min(opts.knn.k, train.size());
    const Model model = train_model(kind, train, opts);
    for (std::size_t i : test_rows)
      if (predict(model, view.row(i)) == view.label(i)) ++right;
  }
  return static_cast<double>(right) / static_cast<double>(view.size());
}

FeatureSubset greedy_select(const LabeledSet& data, ClassifierKind kind, std::size_t max_features,
                            const CvOptions& cv) {
  require_trainable(data);
  const std::size_t limit = std::min(max_features, data.dim());
  if (limit == 0) throw ArgumentError("max_features must be >= 1");

  std::vector<std::size_t> chosen;
  double best = -1.0;
  while (chosen.size() < limit) {
    double round_best = best;
    std::size_t pick = data.dim();
    for (std::size_t f = 0; f < data.dim(); ++f) {
      if (std::find(chosen.begin(), chosen.end(), f) != chosen.end()) continue;
      auto trial = chosen;
      trial.insert(std::lower_bound(trial.begin(), trial.end(), f), f);
      const double acc = cross_validated_accuracy(data, kind, trial, cv);
      if (acc > round_best) {
        round_best = acc;
        pick = f;
      }
    }
    if (pick == data.dim()) break;
    chosen.insert(std::lower_bound(chosen.begin(), chosen.end(), pick), pick);
    best = round_best;
  }
  return {chosen, best};
}

FeatureSubset exhaustive_select(const LabeledSet& data, ClassifierKind kind, std::size_t max_features,
                                const CvOptions& cv) {
  require_trainable(data);
  const std::size_t n = data.dim();
  if (n > kExhaustiveFeatureLimit)
    throw ArgumentError("exhaustive search is limited to " + std::to_string(kExhaustiveFeatureLimit) + " features");
  const std::size_t limit = std::min(max_features, n);
  if (limit == 0) throw ArgumentError("max_features must be >= 1");

  FeatureSubset best{{}, -1.0};
  for (std::size_t size = 1; size <= limit; ++size) {
    // lexicographic walk over combinations via a selection mask
    std::vector<bool> mask(n, false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(size), true);
    do {
      const auto subset = to_indices(mask);
      const double acc = cross_validated_accuracy(data, kind, subset, cv);
      if (acc > best.score) best = {subset, acc};
    } while (std::prev_permutation(mask.begin(), mask.end()));
  }
  return best;
}

FeatureSubset search_select(const LabeledSet& data, ClassifierKind kind, std::size_t max_features,
                            const CvOptions& cv) {
  return data.dim() <= kExhaustiveFeatureLimit ? exhaustive_select(data, kind, max_features, cv)
                                               : greedy_select(data, kind, max_features, cv);
}

GaResult genetic_select(const LabeledSet& data, ClassifierKind kind, const GaConfig& config, const CvOptions& cv) {
  require_trainable(data);
  if (config.population < 2) throw ArgumentError("GA population must be >= 2");
  if (config.crossover_rate < 0.0 || config.crossover_rate > 1.0 || config.mutation_rate < 0.0 ||
      config.mutation_rate > 1.0)
    throw ArgumentError("GA rates must lie in [0, 1]");
  if (config.tournament == 0) throw ArgumentError("tournament size must be >= 1");
  const std::size_t n = data.dim();
  for (const auto& c : config.initial)
    if (c.size() != n) throw ArgumentError("initial chromosome length does not match feature count");

  using Chromosome = std::vector<bool>;
  std::map<Chromosome, double> cache;
  auto fitness = [&](const Chromosome& c) {
    if (auto it = cache.find(c); it != cache.end()) return it->second;
    const auto idx = to_indices(c);
    const double f = idx.empty() ? -1.0
                                 : cross_validated_accuracy(data, kind, idx, cv) -
                                       config.parsimony * static_cast<double>(idx.size());
    cache.emplace(c, f);
    return f;
  };

  Rng rng(config.seed);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution flip(config.mutation_rate);
  std::bernoulli_distribution cross(config.crossover_rate);
  std::uniform_int_distribution<std::size_t> pick(0, config.population - 1);

  std::vector<Chromosome> pop;
  for (const auto& c : config.initial) {
    if (pop.size() == config.population) break;
    pop.push_back(c);
  }
  while (pop.size() < config.population) {
    Chromosome c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = coin(rng);
    pop.push_back(std::move(c));
  }
  std::vector<double> fit(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) fit[i] = fitness(pop[i]);

  GaResult result;
  Chromosome best_ever;
  double best_fit = -std::numeric_limits<double>::infinity();
  auto note_best = [&] {
    for (std::size_t i = 0; i < pop.size(); ++i)
      if (fit[i] > best_fit) {
        best_fit = fit[i];
        best_ever = pop[i];
      }
  };
  note_best();

  auto tournament = [&]() -> const Chromosome& {
    std::size_t winner = pick(rng);
    for (std::size_t t = 1; t < config.tournament; ++t) {
      const std::size_t c = pick(rng);
      if (fit[c] > fit[winner] || (fit[c] == fit[winner] && c < winner)) winner = c;
    }
    return pop[winner];
  };

  for (std::size_t gen = 0; gen < config.generations; ++gen) {
    const auto elite = static_cast<std::size_t>(std::max_element(fit.begin(), fit.end()) - fit.begin());
    std::vector<Chromosome> next{pop[elite]};
    while (next.size() < config.population) {
      Chromosome a = tournament();
      Chromosome b = tournament();
      if (cross(rng))
        for (std::size_t i = 0; i < n; ++i)
          if (coin(rng)) {
            const bool tmp = a[i];
            a[i] = b[i];
            b[i] = tmp;
          }
      for (auto* child : {&a, &b}) {
        for (std::size_t i = 0; i < n; ++i)
          if (flip(rng)) (*child)[i] = !(*child)[i];
        if (next.size() < config.population) next.push_back(*child);
      }
    }
    pop = std::move(next);
    for (std::size_t i = 0; i < pop.size(); ++i) fit[i] = fitness(pop[i]);
    note_best();
    result.best_fitness_history.push_back(best_fit);
  }

  const auto idx = to_indices(best_ever);
  result.best = {idx, cross_validated_accuracy(data, kind, idx, cv)};
  result.best_fitness = best_fit;
  return result;
}

}  // namespace icn
