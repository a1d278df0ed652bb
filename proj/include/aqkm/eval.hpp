#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aqkm/errors.hpp"
#include "aqkm/random.hpp"
#include "aqkm/vecspace.hpp"

namespace aqkm {

inline double accuracy(std::span<const std::string> predicted, std::span<const std::string> truth) {
  if (predicted.size() != truth.size()) {
    throw DimensionError("predicted/truth lengths differ: " + std::to_string(predicted.size()) + " vs " +
                         std::to_string(truth.size()));
  }
  if (truth.empty()) throw EmptySetError("accuracy of an empty sequence");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

/// 1 - sum p_i^2 over empirical class frequencies, evaluated as
/// (n^2 - sum c_i^2) / n^2 so that uniform counts hit (k-1)/k exactly.
inline double gini_index(std::span<const std::string> labels) {
  if (labels.empty()) throw EmptySetError("Gini-Index of an empty label sequence");
  std::map<std::string, std::uint64_t> counts;
  for (const auto& l : labels) ++counts[l];
  const auto n = static_cast<std::uint64_t>(labels.size());
  std::uint64_t sum_sq = 0;
  for (const auto& [label, c] : counts) sum_sq += c * c;
  return static_cast<double>(n * n - sum_sq) / static_cast<double>(n * n);
}

/// Upper bound of the Gini-Index over k classes.
inline double max_gini(std::size_t k) {
  if (k < 1) throw DomainError("max_gini needs k >= 1");
  return static_cast<double>(k - 1) / static_cast<double>(k);
}

/// Accuracy of always predicting the most frequent true class.
inline double most_frequent_class_accuracy(std::span<const std::string> truth) {
  if (truth.empty()) throw EmptySetError("baseline of an empty sequence");
  std::map<std::string, std::size_t> counts;
  std::size_t best = 0;
  for (const auto& l : truth) best = std::max(best, ++counts[l]);
  return static_cast<double>(best) / static_cast<double>(truth.size());
}

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& row : counts) {
      for (std::size_t c : row) t += c;
    }
    return t;
  }

  std::size_t trace() const {
    std::size_t t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
  }
};

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvalReport {
  double accuracy = 0.0;
  std::vector<ClassMetrics> per_class;
  /// Unweighted mean of the per-class triples; `support` is the total.
  ClassMetrics macro_average;
  ConfusionMatrix confusion;
};

inline ConfusionMatrix confusion_matrix(std::span<const std::string> predicted, std::span<const std::string> truth,
                                        const std::vector<std::string>& label_universe) {
  if (predicted.size() != truth.size()) throw DimensionError("predicted/truth lengths differ");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < label_universe.size(); ++i) col.emplace(label_universe[i], i);
  ConfusionMatrix m{label_universe, std::vector<std::vector<std::size_t>>(
                                        label_universe.size(), std::vector<std::size_t>(label_universe.size(), 0))};
  auto lookup = [&](const std::string& l) {
    auto it = col.find(l);
    if (it == col.end()) throw DomainError("label '" + l + "' is outside the label universe");
    return it->second;
  };
  for (std::size_t i = 0; i < truth.size(); ++i) ++m.counts[lookup(truth[i])][lookup(predicted[i])];
  return m;
}

/// Per-class precision/recall/F1; any zero denominator yields 0.
inline EvalReport classification_report(std::span<const std::string> predicted, std::span<const std::string> truth,
                                        const std::vector<std::string>& label_universe) {
  EvalReport r;
  r.accuracy = accuracy(predicted, truth);
  r.confusion = confusion_matrix(predicted, truth, label_universe);
  const std::size_t k = label_universe.size();
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t tp = r.confusion.counts[c][c];
    std::size_t row = 0;
    std::size_t column = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += r.confusion.counts[c][j];
      column += r.confusion.counts[j][c];
    }
    ClassMetrics m{label_universe[c], 0.0, 0.0, 0.0, row};
    if (column > 0) m.precision = static_cast<double>(tp) / static_cast<double>(column);
    if (row > 0) m.recall = static_cast<double>(tp) / static_cast<double>(row);
    if (m.precision + m.recall > 0.0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    r.per_class.push_back(m);
  }
  r.macro_average.label = "average";
  r.macro_average.support = truth.size();
  if (k > 0) {
    for (const auto& m : r.per_class) {
      r.macro_average.precision += m.precision;
      r.macro_average.recall += m.recall;
      r.macro_average.f1 += m.f1;
    }
    r.macro_average.precision /= static_cast<double>(k);
    r.macro_average.recall /= static_cast<double>(k);
    r.macro_average.f1 /= static_cast<double>(k);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Synthetic data

inline std::string class_label(std::size_t c) { return "class" + std::to_string(c); }

/// Isotropic Gaussian clusters labeled "class0", "class1", ... Points are
/// emitted cluster by cluster with ids "0".."n-1".
inline Dataset make_gaussian_mixture(const std::vector<std::vector<double>>& cluster_means,
                                     const std::vector<double>& cluster_stddevs,
                                     const std::vector<std::size_t>& points_per_cluster, std::uint64_t rng_seed) {
  if (cluster_means.empty()) throw EmptySetError("mixture needs at least one cluster");
  if (cluster_stddevs.size() != cluster_means.size() || points_per_cluster.size() != cluster_means.size()) {
    throw DimensionError("means, stddevs and counts must have one entry per cluster");
  }
  const std::size_t dim = cluster_means.front().size();
  for (std::size_t c = 0; c < cluster_means.size(); ++c) {
    require_same_dim(dim, cluster_means[c].size());
    if (!(cluster_stddevs[c] > 0.0) || !std::isfinite(cluster_stddevs[c])) {
      throw DomainError("cluster stddev must be positive and finite");
    }
    if (points_per_cluster[c] < 1) throw DomainError("each cluster needs at least one point");
  }
  Rng rng(derive_seed(rng_seed, "gaussian-mixture"));
  std::vector<DenseVector> points;
  std::vector<std::optional<std::string>> labels;
  std::vector<std::string> universe;
  for (std::size_t c = 0; c < cluster_means.size(); ++c) {
    universe.push_back(class_label(c));
    for (std::size_t i = 0; i < points_per_cluster[c]; ++i) {
      std::vector<double> v(dim);
      for (std::size_t j = 0; j < dim; ++j) v[j] = cluster_means[c][j] + cluster_stddevs[c] * rng.normal();
      points.emplace_back(std::move(v));
      labels.emplace_back(universe.back());
    }
  }
  return Dataset::with_sequential_ids(std::move(points), std::move(labels), std::move(universe));
}

/// Seeded shuffle, then the first round(test_fraction * n) points form the
/// test split. Both splits keep the original order of their members.
inline std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double test_fraction,
                                                    std::uint64_t rng_seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw DomainError("test fraction must be in (0, 1)");
  if (data.size() < 2) throw InsufficientDataError("need at least 2 points to split");
  Rng rng(derive_seed(rng_seed, "train-test-split"));
  auto order = rng.sample_without_replacement(data.size(), data.size());
  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(data.size())));
  n_test = std::clamp<std::size_t>(n_test, 1, data.size() - 1);
  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {data.subset(train), data.subset(test)};
}

}  // namespace aqkm
