#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aqkm/errors.hpp"

namespace aqkm {

/// Fixed-dimension vector of finite doubles. Immutable once built.
class DenseVector {
 public:
  DenseVector() = default;

  explicit DenseVector(std::vector<double> components) : components_(std::move(components)) {
    if (components_.empty()) throw DimensionError("DenseVector needs dim >= 1");
    for (double c : components_) {
      if (!std::isfinite(c)) throw DomainError("DenseVector component is not finite");
    }
  }

  DenseVector(std::initializer_list<double> components)
      : DenseVector(std::vector<double>(components)) {}

  static DenseVector zeros(std::size_t dim) { return DenseVector(std::vector<double>(dim, 0.0)); }

  std::size_t dim() const noexcept { return components_.size(); }
  double operator[](std::size_t i) const { return components_[i]; }
  std::span<const double> values() const noexcept { return components_; }
  auto begin() const noexcept { return components_.begin(); }
  auto end() const noexcept { return components_.end(); }

  friend bool operator==(const DenseVector&, const DenseVector&) = default;

 private:
  std::vector<double> components_;
};

inline void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw DimensionError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

/// Squared Euclidean distance. Used for comparisons; exposed distances go
/// through euclidean_distance.
inline double squared_distance(const DenseVector& p, const DenseVector& q) {
  require_same_dim(p.dim(), q.dim());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const double d = p[i] - q[i];
    sum += d * d;
  }
  return sum;
}

inline double euclidean_distance(const DenseVector& p, const DenseVector& q) {
  return std::sqrt(squared_distance(p, q));
}

inline DenseVector mean_vector(std::span<const DenseVector> points) {
  if (points.empty()) throw EmptySetError("mean of an empty point set");
  const std::size_t dim = points.front().dim();
  std::vector<double> sum(dim, 0.0);
  for (const auto& p : points) {
    require_same_dim(dim, p.dim());
    for (std::size_t i = 0; i < dim; ++i) sum[i] += p[i];
  }
  const double n = static_cast<double>(points.size());
  for (double& s : sum) s /= n;
  return DenseVector(std::move(sum));
}

/// Ordered points with unique ids, optional ground-truth labels and the
/// closed set of class labels.
class Dataset {
 public:
  Dataset() = default;

  /// An empty `label_universe` is inferred as the sorted set of present labels.
  Dataset(std::vector<DenseVector> points, std::vector<std::string> ids,
          std::vector<std::optional<std::string>> labels,
          std::vector<std::string> label_universe = {})
      : points_(std::move(points)),
        ids_(std::move(ids)),
        labels_(std::move(labels)),
        universe_(std::move(label_universe)) {
    if (labels_.empty()) labels_.resize(points_.size());
    if (ids_.size() != points_.size() || labels_.size() != points_.size()) {
      throw DimensionError("dataset ids/labels/points have different lengths");
    }
    for (const auto& p : points_) require_same_dim(points_.front().dim(), p.dim());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (!index_.emplace(ids_[i], i).second) throw DomainError("duplicate point id '" + ids_[i] + "'");
    }
    if (universe_.empty()) {
      for (const auto& l : labels_) {
        if (l) universe_.push_back(*l);
      }
      std::sort(universe_.begin(), universe_.end());
      universe_.erase(std::unique(universe_.begin(), universe_.end()), universe_.end());
    } else {
      std::vector<std::string> sorted = universe_;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw DomainError("label universe has duplicates");
      }
      for (const auto& l : labels_) {
        if (l && !std::binary_search(sorted.begin(), sorted.end(), *l)) {
          throw DomainError("label '" + *l + "' is outside the label universe");
        }
      }
    }
  }

  /// Points with ids "0".."n-1".
  static Dataset with_sequential_ids(std::vector<DenseVector> points,
                                     std::vector<std::optional<std::string>> labels = {},
                                     std::vector<std::string> label_universe = {}) {
    std::vector<std::string> ids(points.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = std::to_string(i);
    return Dataset(std::move(points), std::move(ids), std::move(labels), std::move(label_universe));
  }

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  std::size_t dim() const noexcept { return points_.empty() ? 0 : points_.front().dim(); }

  const DenseVector& point(std::size_t i) const { return points_.at(i); }
  const std::string& id(std::size_t i) const { return ids_.at(i); }
  const std::optional<std::string>& label(std::size_t i) const { return labels_.at(i); }

  std::span<const DenseVector> points() const noexcept { return points_; }
  std::span<const std::string> ids() const noexcept { return ids_; }
  std::span<const std::optional<std::string>> labels() const noexcept { return labels_; }
  const std::vector<std::string>& label_universe() const noexcept { return universe_; }

  std::optional<std::size_t> find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(const std::string& id) const {
    auto i = find(id);
    if (!i) throw LookupError("unknown point id '" + id + "'");
    return *i;
  }

  bool fully_labeled() const {
    return std::all_of(labels_.begin(), labels_.end(), [](const auto& l) { return l.has_value(); });
  }

  /// Ground-truth labels; throws when any point is unlabeled.
  std::vector<std::string> required_labels() const {
    std::vector<std::string> out;
    out.reserve(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (!labels_[i]) throw MissingLabelError("point '" + ids_[i] + "' has no ground-truth label");
      out.push_back(*labels_[i]);
    }
    return out;
  }

  /// Points at `indices`, in that order, sharing this dataset's universe.
  Dataset subset(std::span<const std::size_t> indices) const {
    std::vector<DenseVector> pts;
    std::vector<std::string> ids;
    std::vector<std::optional<std::string>> labels;
    for (std::size_t i : indices) {
      pts.push_back(point(i));
      ids.push_back(ids_[i]);
      labels.push_back(labels_[i]);
    }
    return Dataset(std::move(pts), std::move(ids), std::move(labels), universe_);
  }

 private:
  std::vector<DenseVector> points_;
  std::vector<std::string> ids_;
  std::vector<std::optional<std::string>> labels_;
  std::vector<std::string> universe_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace aqkm
