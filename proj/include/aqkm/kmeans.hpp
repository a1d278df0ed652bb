#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
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

struct FitConfig {
  std::size_t k = 1;
  std::size_t max_iterations = 300;
  /// Convergence threshold on the largest centroid L2 shift.
  double tolerance = 1e-6;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (k < 1) throw DomainError("k must be >= 1");
    if (max_iterations < 1) throw DomainError("max_iterations must be >= 1");
    if (!(tolerance >= 0.0)) throw DomainError("tolerance must be >= 0");
  }
};

/// k centroids, each optionally bound to a class label.
struct ClusterModel {
  std::vector<DenseVector> centroids;
  std::vector<std::optional<std::string>> cluster_labels;
  double inertia = 0.0;
  std::size_t iterations_run = 0;

  std::size_t k() const noexcept { return centroids.size(); }
  std::size_t dim() const noexcept { return centroids.empty() ? 0 : centroids.front().dim(); }
};

/// A fitted model plus the per-point trace of the run that produced it.
struct FitResult {
  ClusterModel model;
  std::vector<std::size_t> assignments;
  /// Inertia measured after each assignment step, in iteration order.
  std::vector<double> inertia_trace;
  bool converged = false;
};

/// Index of the nearest centroid; ties go to the lowest index.
inline std::size_t nearest_centroid(const DenseVector& point, std::span<const DenseVector> centroids,
                                    double* squared = nullptr) {
  if (centroids.empty()) throw EmptySetError("no centroids");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < centroids.size(); ++j) {
    const double d = squared_distance(point, centroids[j]);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  if (squared) *squared = best_d;
  return best;
}

inline std::vector<std::size_t> assign(std::span<const DenseVector> points,
                                       std::span<const DenseVector> centroids) {
  if (centroids.empty()) throw EmptySetError("no centroids");
  std::vector<std::size_t> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = nearest_centroid(points[i], centroids);
  return out;
}

inline std::vector<std::size_t> assign(const Dataset& data, std::span<const DenseVector> centroids) {
  return assign(data.points(), centroids);
}

/// Per-cluster means. A cluster with no members keeps `previous[j]`.
inline std::vector<DenseVector> update_centroids(std::span<const DenseVector> points,
                                                 std::span<const std::size_t> assignments,
                                                 std::span<const DenseVector> previous) {
  const std::size_t k = previous.size();
  if (assignments.size() != points.size()) throw DimensionError("assignment count differs from point count");
  if (k == 0) throw EmptySetError("no centroids");
  const std::size_t dim = previous.front().dim();
  std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t j = assignments[i];
    if (j >= k) throw DomainError("assignment " + std::to_string(j) + " outside [0, k)");
    require_same_dim(dim, points[i].dim());
    for (std::size_t c = 0; c < dim; ++c) sums[j][c] += points[i][c];
    ++counts[j];
  }
  std::vector<DenseVector> out;
  out.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    if (counts[j] == 0) {
      out.push_back(previous[j]);
      continue;
    }
    const double n = static_cast<double>(counts[j]);
    for (double& s : sums[j]) s /= n;
    out.emplace_back(std::move(sums[j]));
  }
  return out;
}

inline double inertia_of(std::span<const DenseVector> points, std::span<const DenseVector> centroids,
                         std::span<const std::size_t> assignments) {
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) sum += squared_distance(points[i], centroids[assignments[i]]);
  return sum;
}

/// Lloyd iteration from the given centroids until the largest centroid
/// shift falls below the tolerance, assignments stop changing, or
/// max_iterations is reached. Labels are carried through unchanged.
inline FitResult fit(const Dataset& data, std::vector<DenseVector> initial_centroids,
                     std::vector<std::optional<std::string>> initial_labels, const FitConfig& config) {
  config.validate();
  if (data.empty()) throw EmptySetError("cannot fit on an empty dataset");
  if (initial_centroids.size() != config.k) {
    throw DomainError("expected " + std::to_string(config.k) + " initial centroids, got " +
                      std::to_string(initial_centroids.size()));
  }
  if (initial_labels.empty()) initial_labels.resize(config.k);
  if (initial_labels.size() != config.k) throw DimensionError("one label per centroid expected");
  for (const auto& c : initial_centroids) require_same_dim(data.dim(), c.dim());

  const auto points = data.points();
  FitResult result;
  std::vector<DenseVector> centroids = std::move(initial_centroids);
  std::vector<std::size_t> previous;
  std::size_t it = 0;
  while (it < config.max_iterations) {
    ++it;
    std::vector<std::size_t> current = assign(points, centroids);
    result.inertia_trace.push_back(inertia_of(points, centroids, current));
    if (it > 1 && current == previous) {
      result.converged = true;
      break;
    }
    std::vector<DenseVector> next = update_centroids(points, current, centroids);
    double max_shift = 0.0;
    for (std::size_t j = 0; j < next.size(); ++j) {
      max_shift = std::max(max_shift, euclidean_distance(next[j], centroids[j]));
    }
    centroids = std::move(next);
    previous = std::move(current);
    if (max_shift < config.tolerance || max_shift == 0.0) {
      result.converged = true;
      break;
    }
  }

  result.assignments = assign(points, centroids);
  result.model.inertia = inertia_of(points, centroids, result.assignments);
  result.model.centroids = std::move(centroids);
  result.model.cluster_labels = std::move(initial_labels);
  result.model.iterations_run = it;
  return result;
}

/// Majority ground-truth label per cluster; ties go to the earliest label in
/// the universe, clusters without labeled members stay unlabeled.
inline std::vector<std::optional<std::string>> majority_labels(const Dataset& data,
                                                               std::span<const std::size_t> assignments,
                                                               std::size_t k) {
  const auto& universe = data.label_universe();
  std::map<std::string, std::size_t> rank;
  for (std::size_t i = 0; i < universe.size(); ++i) rank.emplace(universe[i], i);
  std::vector<std::vector<std::size_t>> votes(k, std::vector<std::size_t>(universe.size(), 0));
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (const auto& l = data.label(i)) ++votes[assignments[i]][rank.at(*l)];
  }
  std::vector<std::optional<std::string>> out(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t best = 0;
    std::size_t best_votes = 0;
    for (std::size_t r = 0; r < universe.size(); ++r) {
      if (votes[j][r] > best_votes) {
        best_votes = votes[j][r];
        best = r;
      }
    }
    if (best_votes > 0) out[j] = universe[best];
  }
  return out;
}

/// Lloyd from k distinct uniformly drawn points.
inline FitResult fit_unsupervised(const Dataset& data, const FitConfig& config) {
  config.validate();
  if (data.size() < config.k) {
    throw InsufficientDataError("need at least k = " + std::to_string(config.k) + " points, have " +
                                std::to_string(data.size()));
  }
  Rng rng(derive_seed(config.rng_seed, "unsupervised-init"));
  std::vector<DenseVector> init;
  for (std::size_t i : rng.sample_without_replacement(data.size(), config.k)) init.push_back(data.point(i));
  FitResult result = fit(data, std::move(init), {}, config);
  result.model.cluster_labels = majority_labels(data, result.assignments, config.k);
  return result;
}

struct Prediction {
  std::size_t cluster = 0;
  std::optional<std::string> label;
};

inline Prediction predict(const ClusterModel& model, const DenseVector& point) {
  if (model.centroids.empty()) throw EmptySetError("model has no centroids");
  require_same_dim(model.dim(), point.dim());
  Prediction p;
  p.cluster = nearest_centroid(point, model.centroids);
  if (p.cluster < model.cluster_labels.size()) p.label = model.cluster_labels[p.cluster];
  return p;
}

inline std::vector<Prediction> predict(const ClusterModel& model, std::span<const DenseVector> points) {
  std::vector<Prediction> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(predict(model, p));
  return out;
}

}  // namespace aqkm
