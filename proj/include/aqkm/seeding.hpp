#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "aqkm/errors.hpp"
#include "aqkm/oracle.hpp"
#include "aqkm/random.hpp"
#include "aqkm/vecspace.hpp"

namespace aqkm {

/// Penalty applied to distances from seeds whose label already has
/// `count` seeds. Every kind is positive and non-increasing for count >= 1.
enum class PenaltyKind {
  kInverseExp,     // e^-x
  kInverseLog,     // 1 / ln(x + 1); shifted so x = 1 is finite
  kInverse,        // 1 / x
  kInverseSquare,  // 1 / x^2
  kInverseSqrt,    // 1 / sqrt(x)
};

inline constexpr std::array<PenaltyKind, 5> kAllPenaltyKinds = {
    PenaltyKind::kInverseExp, PenaltyKind::kInverseLog, PenaltyKind::kInverse, PenaltyKind::kInverseSquare,
    PenaltyKind::kInverseSqrt};

inline constexpr PenaltyKind kDefaultPenalty = PenaltyKind::kInverseSqrt;

inline std::string_view to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::kInverseExp: return "inverse_exp";
    case PenaltyKind::kInverseLog: return "inverse_log";
    case PenaltyKind::kInverse: return "inverse";
    case PenaltyKind::kInverseSquare: return "inverse_square";
    case PenaltyKind::kInverseSqrt: return "inverse_sqrt";
  }
  return "?";
}

inline PenaltyKind parse_penalty_kind(std::string_view name) {
  for (PenaltyKind k : kAllPenaltyKinds) {
    if (to_string(k) == name) return k;
  }
  throw DomainError("unknown penalty kind '" + std::string(name) + "'");
}

inline double phi(PenaltyKind kind, std::size_t count) {
  if (count < 1) throw DomainError("penalty count must be >= 1");
  const double x = static_cast<double>(count);
  switch (kind) {
    case PenaltyKind::kInverseExp: return std::exp(-x);
    case PenaltyKind::kInverseLog: return 1.0 / std::log(x + 1.0);
    case PenaltyKind::kInverse: return 1.0 / x;
    case PenaltyKind::kInverseSquare: return 1.0 / (x * x);
    case PenaltyKind::kInverseSqrt: return 1.0 / std::sqrt(x);
  }
  throw DomainError("unknown penalty kind");
}

struct SeedEntry {
  /// Position of the point in the dataset it was drawn from.
  std::size_t index = 0;
  std::string id;
  DenseVector vector;
  std::string label;
};

using LabelCounts = std::map<std::string, std::size_t>;

/// Labeled seeds in selection order with a running label histogram.
class SeedSet {
 public:
  void add(SeedEntry entry) {
    if (!ids_.insert(entry.id).second) throw DomainError("point '" + entry.id + "' is already a seed");
    indices_.insert(entry.index);
    ++counts_[entry.label];
    entries_.push_back(std::move(entry));
  }

  const std::vector<SeedEntry>& entries() const noexcept { return entries_; }
  const LabelCounts& label_counts() const noexcept { return counts_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  bool contains_index(std::size_t index) const { return indices_.count(index) != 0; }
  bool contains_id(const std::string& id) const { return ids_.count(id) != 0; }

  std::size_t count(const std::string& label) const {
    auto it = counts_.find(label);
    return it == counts_.end() ? 0 : it->second;
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.label);
    return out;
  }

 private:
  std::vector<SeedEntry> entries_;
  LabelCounts counts_;
  std::unordered_set<std::string> ids_;
  std::unordered_set<std::size_t> indices_;
};

inline double penalized_distance(const SeedEntry& seed, const DenseVector& candidate, const LabelCounts& counts,
                                 PenaltyKind kind) {
  auto it = counts.find(seed.label);
  const std::size_t count = it == counts.end() ? 0 : it->second;
  return phi(kind, count) * euclidean_distance(seed.vector, candidate);
}

inline double min_penalized_distance(const DenseVector& candidate, const SeedSet& seeds, PenaltyKind kind) {
  if (seeds.empty()) throw EmptySetError("no seeds selected yet");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : seeds.entries()) {
    best = std::min(best, penalized_distance(s, candidate, seeds.label_counts(), kind));
  }
  return best;
}

/// The candidate (by dataset index) maximizing its minimum penalized
/// distance to the seeds. Already-selected points are skipped; ties go to
/// the lowest dataset index.
inline std::size_t select_next(const SeedSet& seeds, const Dataset& data, std::span<const std::size_t> candidates,
                               PenaltyKind kind) {
  if (seeds.empty()) throw EmptySetError("no seeds selected yet");
  bool found = false;
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t c : candidates) {
    if (c >= data.size()) throw LookupError("candidate index " + std::to_string(c) + " out of range");
    if (seeds.contains_index(c)) continue;
    const double score = min_penalized_distance(data.point(c), seeds, kind);
    if (!found || score > best_score || (score == best_score && c < best)) {
      found = true;
      best = c;
      best_score = score;
    }
  }
  if (!found) throw EmptySetError("no unselected candidates");
  return best;
}

/// Every unselected point of `data` is a candidate.
inline std::size_t select_next(const SeedSet& seeds, const Dataset& data, PenaltyKind kind) {
  std::vector<std::size_t> all(data.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return select_next(seeds, data, all, kind);
}

/// Incremental Penalized Min-Max selection over a whole dataset.
///
/// Since a label's penalty factor is shared by all of its seeds, the
/// minimum over seeds of one label is that factor times the minimum raw
/// distance to those seeds. The selector caches the raw minimum per
/// (candidate, label) and recombines with the current factors each round,
/// so adding a seed costs O(n) distance evaluations and a round O(n * L).
class PenalizedMinMaxSelector {
 public:
  PenalizedMinMaxSelector(const Dataset& data, PenaltyKind kind)
      : data_(data), kind_(kind), selected_(data.size(), false) {}

  void add_seed(std::size_t index, const std::string& label) {
    if (index >= data_.size()) throw LookupError("seed index out of range");
    auto [it, inserted] = label_column_.emplace(label, label_names_.size());
    if (inserted) {
      label_names_.push_back(label);
      counts_.push_back(0);
      raw_min_.resize(data_.size() * label_names_.size(), std::numeric_limits<double>::infinity());
      // re-layout: columns are appended, so move rows to the new stride
      relayout(label_names_.size() - 1);
    }
    const std::size_t col = it->second;
    ++counts_[col];
    selected_[index] = true;
    const DenseVector& seed = data_.point(index);
    const std::size_t stride = label_names_.size();
    for (std::size_t c = 0; c < data_.size(); ++c) {
      double& slot = raw_min_[c * stride + col];
      slot = std::min(slot, euclidean_distance(seed, data_.point(c)));
    }
  }

  bool selected(std::size_t index) const { return selected_.at(index); }

  /// Next point to query. Throws when every point is already selected.
  std::size_t next() const {
    if (label_names_.empty()) throw EmptySetError("no seeds selected yet");
    const std::size_t stride = label_names_.size();
    std::vector<double> factor(stride);
    for (std::size_t l = 0; l < stride; ++l) factor[l] = phi(kind_, counts_[l]);
    bool found = false;
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t c = 0; c < data_.size(); ++c) {
      if (selected_[c]) continue;
      double score = std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < stride; ++l) score = std::min(score, factor[l] * raw_min_[c * stride + l]);
      if (!found || score > best_score) {
        found = true;
        best = c;
        best_score = score;
      }
    }
    if (!found) throw EmptySetError("no unselected candidates");
    return best;
  }

 private:
  // Widens rows from stride `old_stride` to `old_stride + 1` in place.
  void relayout(std::size_t old_stride) {
    if (old_stride == 0) return;
    const std::size_t new_stride = old_stride + 1;
    for (std::size_t c = data_.size(); c-- > 0;) {
      for (std::size_t l = old_stride; l-- > 0;) raw_min_[c * new_stride + l] = raw_min_[c * old_stride + l];
      raw_min_[c * new_stride + old_stride] = std::numeric_limits<double>::infinity();
    }
  }

  const Dataset& data_;
  PenaltyKind kind_;
  std::vector<bool> selected_;
  std::map<std::string, std::size_t> label_column_;
  std::vector<std::string> label_names_;
  std::vector<std::size_t> counts_;
  std::vector<double> raw_min_;  // row-major [candidate][label column]
};

/// Grows `seeds` to `budget` entries by active querying. The first seed (if
/// `seeds` is empty) is uniform-random; every later one is the Penalized
/// Min-Max pick. On an oracle error `seeds` keeps every answered query.
inline void extend_seed_set(SeedSet& seeds, const Dataset& data, std::size_t budget, LabelOracle& oracle,
                            PenaltyKind kind, std::uint64_t rng_seed) {
  if (budget < 1) throw DomainError("seed budget must be >= 1");
  if (budget > data.size()) {
    throw DomainError("seed budget " + std::to_string(budget) + " exceeds dataset size " +
                      std::to_string(data.size()));
  }
  PenalizedMinMaxSelector selector(data, kind);
  for (const auto& e : seeds.entries()) selector.add_seed(e.index, e.label);

  auto take = [&](std::size_t index) {
    std::string label = oracle.query_index(data, index);
    selector.add_seed(index, label);
    seeds.add({index, data.id(index), data.point(index), std::move(label)});
  };

  if (seeds.empty()) {
    Rng rng(derive_seed(rng_seed, "first-seed"));
    take(rng.uniform_index(data.size()));
  }
  while (seeds.size() < budget) take(selector.next());
}

inline SeedSet build_seed_set(const Dataset& data, std::size_t budget, LabelOracle& oracle, PenaltyKind kind,
                              std::uint64_t rng_seed) {
  SeedSet seeds;
  extend_seed_set(seeds, data, budget, oracle, kind, rng_seed);
  return seeds;
}

/// max(1, round(fraction * n)).
inline std::size_t seed_count_for_ratio(double fraction, std::size_t n) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw DomainError("fraction must be in (0, 1]");
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  return std::max<std::size_t>(1, count);
}

/// Uniform sample without replacement, labeled from ground truth.
inline SeedSet random_seed_subset(const Dataset& data, double fraction, std::uint64_t rng_seed) {
  const std::size_t count = seed_count_for_ratio(fraction, data.size());
  if (data.empty()) throw EmptySetError("cannot sample seeds from an empty dataset");
  Rng rng(derive_seed(rng_seed, "random-subset"));
  SeedSet seeds;
  for (std::size_t i : rng.sample_without_replacement(data.size(), count)) {
    const auto& l = data.label(i);
    if (!l) throw MissingLabelError("point '" + data.id(i) + "' has no ground-truth label");
    seeds.add({i, data.id(i), data.point(i), *l});
  }
  return seeds;
}

/// Semi-variant seeding through an oracle: the same uniform sample as
/// random_seed_subset, but each label comes from `oracle`. On an oracle
/// error `seeds` keeps every answered query.
inline void query_random_subset(SeedSet& seeds, const Dataset& data, double fraction, LabelOracle& oracle,
                                std::uint64_t rng_seed) {
  const std::size_t count = seed_count_for_ratio(fraction, data.size());
  if (data.empty()) throw EmptySetError("cannot sample seeds from an empty dataset");
  Rng rng(derive_seed(rng_seed, "random-subset"));
  for (std::size_t i : rng.sample_without_replacement(data.size(), count)) {
    if (seeds.contains_index(i)) continue;
    std::string label = oracle.query_index(data, i);
    seeds.add({i, data.id(i), data.point(i), std::move(label)});
  }
}

struct InitialCentroids {
  std::vector<DenseVector> centroids;
  std::vector<std::optional<std::string>> labels;
};

/// One centroid per class of `label_universe`, in that order: the mean of
/// the class's seeds, or a random data point when the class has none.
inline InitialCentroids centroids_from_seeds(const SeedSet& seeds, const Dataset& data,
                                             const std::vector<std::string>& label_universe, std::size_t k,
                                             std::uint64_t rng_seed) {
  if (k != label_universe.size()) {
    throw DomainError("k = " + std::to_string(k) + " but the label universe has " +
                      std::to_string(label_universe.size()) + " classes");
  }
  std::map<std::string, std::vector<DenseVector>> by_label;
  for (const auto& e : seeds.entries()) {
    if (std::find(label_universe.begin(), label_universe.end(), e.label) == label_universe.end()) {
      throw DomainError("seed label '" + e.label + "' is outside the label universe");
    }
    by_label[e.label].push_back(e.vector);
  }
  std::size_t missing = 0;
  for (const auto& l : label_universe) missing += by_label.count(l) ? 0 : 1;
  std::vector<std::size_t> fallback;
  if (missing > 0) {
    if (data.empty()) throw EmptySetError("no data points to stand in for unseeded classes");
    Rng rng(derive_seed(rng_seed, "unseeded-class"));
    fallback = rng.sample_without_replacement(data.size(), missing);
    // more missing classes than points: reuse draws
    for (std::size_t i = fallback.size(); i < missing; ++i) fallback.push_back(rng.uniform_index(data.size()));
  }
  InitialCentroids out;
  std::size_t next_fallback = 0;
  for (const auto& l : label_universe) {
    auto it = by_label.find(l);
    if (it != by_label.end()) {
      out.centroids.push_back(mean_vector(it->second));
    } else {
      out.centroids.push_back(data.point(fallback[next_fallback++]));
    }
    out.labels.emplace_back(l);
  }
  return out;
}

}  // namespace aqkm
