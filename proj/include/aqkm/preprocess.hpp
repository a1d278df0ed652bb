#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "aqkm/errors.hpp"
#include "aqkm/random.hpp"
#include "aqkm/vecspace.hpp"

namespace aqkm {

/// One pre-tokenized document. Tokens may be empty.
struct TokenizedDocument {
  std::string id;
  std::vector<std::string> tokens;
  std::optional<std::string> label;
};

// ---------------------------------------------------------------------------
// TF-IDF
//
// Raw term counts weighted by smoothed idf(t) = ln((1 + N) / (1 + df(t))) + 1,
// then L2-normalized. Vocabulary columns are assigned by first occurrence.

class TfIdfModel {
 public:
  TfIdfModel() = default;

  /// Builds a model from explicit parts (deserialization, hand-built tests).
  TfIdfModel(std::vector<std::string> vocabulary, std::vector<double> idf, std::size_t doc_count)
      : vocabulary_(std::move(vocabulary)), idf_(std::move(idf)), doc_count_(doc_count) {
    if (vocabulary_.size() != idf_.size()) throw DimensionError("vocabulary and idf lengths differ");
    if (doc_count_ == 0) throw DomainError("doc_count must be positive");
    for (double v : idf_) {
      if (!std::isfinite(v) || v < 0.0) throw DomainError("idf values must be finite and >= 0");
    }
    for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
      if (!index_.emplace(vocabulary_[i], i).second) {
        throw DomainError("duplicate vocabulary token '" + vocabulary_[i] + "'");
      }
    }
  }

  const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }
  const std::vector<double>& idf() const noexcept { return idf_; }
  std::size_t doc_count() const noexcept { return doc_count_; }
  std::size_t size() const noexcept { return vocabulary_.size(); }

  std::optional<std::size_t> column(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::string> vocabulary_;
  std::vector<double> idf_;
  std::size_t doc_count_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

inline TfIdfModel fit_tfidf(std::span<const TokenizedDocument> corpus) {
  if (corpus.empty()) throw EmptySetError("cannot fit TF-IDF on an empty corpus");
  std::vector<std::string> vocab;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::size_t> df;
  std::vector<std::size_t> last_doc;  // last document that counted toward df
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (const auto& tok : corpus[d].tokens) {
      auto [it, inserted] = index.emplace(tok, vocab.size());
      if (inserted) {
        vocab.push_back(tok);
        df.push_back(0);
        last_doc.push_back(SIZE_MAX);
      }
      const std::size_t col = it->second;
      if (last_doc[col] != d) {
        last_doc[col] = d;
        ++df[col];
      }
    }
  }
  if (vocab.empty()) throw EmptySetError("corpus contains no tokens");
  const double n = static_cast<double>(corpus.size());
  std::vector<double> idf(vocab.size());
  for (std::size_t j = 0; j < vocab.size(); ++j) {
    idf[j] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[j]))) + 1.0;
  }
  return TfIdfModel(std::move(vocab), std::move(idf), corpus.size());
}

inline DenseVector transform_tfidf(const TfIdfModel& model, const TokenizedDocument& doc) {
  if (model.size() == 0) throw EmptySetError("TF-IDF model has an empty vocabulary");
  std::vector<double> v(model.size(), 0.0);
  for (const auto& tok : doc.tokens) {
    if (auto col = model.column(tok)) v[*col] += 1.0;
  }
  double norm2 = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] *= model.idf()[j];
    norm2 += v[j] * v[j];
  }
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
  }
  return DenseVector(std::move(v));
}

/// Folds `vector` onto `target_dim` slots: out[j] = sum of in[i] with i % target_dim == j.
inline DenseVector feature_hash(const DenseVector& vector, std::size_t target_dim) {
  if (target_dim < 1) throw DomainError("feature_hash target_dim must be >= 1");
  std::vector<double> out(target_dim, 0.0);
  for (std::size_t i = 0; i < vector.dim(); ++i) out[i % target_dim] += vector[i];
  return DenseVector(std::move(out));
}

// ---------------------------------------------------------------------------
// PCA

struct ComponentCount {
  std::size_t value;
};

/// Retained-dimension fraction of the input dimension, in (0, 1].
struct LevelFraction {
  double value;
};

using PcaTarget = std::variant<ComponentCount, LevelFraction>;

/// Number of components `target` asks for on `input_dim` columns.
inline std::size_t resolve_component_count(const PcaTarget& target, std::size_t input_dim) {
  if (const auto* c = std::get_if<ComponentCount>(&target)) {
    if (c->value < 1 || c->value > input_dim) {
      throw DomainError("component count must be in [1, " + std::to_string(input_dim) + "]");
    }
    return c->value;
  }
  const double f = std::get<LevelFraction>(target).value;
  if (!(f > 0.0 && f <= 1.0)) throw DomainError("PCA level must be in (0, 1]");
  // guard against products like 0.05 * 100 = 5.000000000000001
  const double raw = f * static_cast<double>(input_dim);
  auto m = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::clamp<std::size_t>(m, 1, input_dim);
}

struct PcaOptions {
  /// Inputs up to this dimension use an exact covariance eigendecomposition.
  std::size_t exact_dim_limit = 2000;
  std::size_t power_iterations = 12;
  std::size_t oversampling = 10;
  std::uint64_t seed = 0x5eed;
};

struct PcaModel {
  DenseVector mean;
  /// Orthonormal principal axes, descending eigenvalue order.
  std::vector<DenseVector> components;
  std::vector<double> explained_variance_ratio;

  std::size_t input_dim() const noexcept { return mean.dim(); }
  std::size_t output_dim() const noexcept { return components.size(); }
};

namespace detail {

inline Eigen::MatrixXd centered_matrix(std::span<const DenseVector> points, const DenseVector& mean) {
  const auto n = static_cast<Eigen::Index>(points.size());
  const auto d = static_cast<Eigen::Index>(mean.dim());
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = p[static_cast<std::size_t>(j)] - mean[static_cast<std::size_t>(j)];
  }
  return x;
}

/// Sign convention: the largest-magnitude entry of each axis is positive.
inline void canonical_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(arg)) + 1e-12) arg = i;
  }
  if (v(arg) < 0.0) v = -v;
}

/// Extends the orthonormal columns of `basis` to `m` columns with unit axes.
inline Eigen::MatrixXd complete_orthonormal(const Eigen::MatrixXd& basis, Eigen::Index m) {
  const Eigen::Index d = basis.rows();
  Eigen::MatrixXd out(d, m);
  Eigen::Index have = std::min(basis.cols(), m);
  out.leftCols(have) = basis.leftCols(have);
  for (Eigen::Index axis = 0; axis < d && have < m; ++axis) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(d, axis);
    for (int pass = 0; pass < 2; ++pass) {
      v -= out.leftCols(have) * (out.leftCols(have).transpose() * v);
    }
    const double norm = v.norm();
    if (norm > 1e-6) out.col(have++) = v / norm;
  }
  return out;
}

struct EigenPairs {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // d x m
};

inline EigenPairs top_eigen_exact(const Eigen::MatrixXd& x, Eigen::Index m) {
  const double denom = static_cast<double>(x.rows() - 1);
  Eigen::MatrixXd cov = (x.transpose() * x) / denom;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const Eigen::Index d = cov.rows();
  EigenPairs out{Eigen::VectorXd(m), Eigen::MatrixXd(d, m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    out.values(i) = solver.eigenvalues()(d - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(d - 1 - i);
  }
  return out;
}

// Wide data with few rows: eigendecompose the n x n Gram matrix instead.
inline EigenPairs top_eigen_gram(const Eigen::MatrixXd& x, Eigen::Index m) {
  const double denom = static_cast<double>(x.rows() - 1);
  Eigen::MatrixXd gram = (x * x.transpose()) / denom;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  const Eigen::Index n = gram.rows();
  const double top = std::max(solver.eigenvalues()(n - 1), 0.0);
  Eigen::MatrixXd basis(x.cols(), 0);
  std::vector<double> values;
  for (Eigen::Index i = 0; i < std::min(m, n); ++i) {
    const double lambda = solver.eigenvalues()(n - 1 - i);
    if (lambda <= 1e-12 * top || lambda <= 0.0) break;
    Eigen::VectorXd v = x.transpose() * solver.eigenvectors().col(n - 1 - i);
    v.normalize();
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = v;
    values.push_back(lambda);
  }
  EigenPairs out{Eigen::VectorXd::Zero(m), complete_orthonormal(basis, m)};
  for (std::size_t i = 0; i < values.size(); ++i) out.values(static_cast<Eigen::Index>(i)) = values[i];
  return out;
}

// Randomized block subspace iteration followed by Rayleigh-Ritz.
inline EigenPairs top_eigen_randomized(const Eigen::MatrixXd& x, Eigen::Index m, const PcaOptions& opt) {
  const Eigen::Index d = x.cols();
  const Eigen::Index l = std::min<Eigen::Index>(d, m + static_cast<Eigen::Index>(opt.oversampling));
  Rng rng(opt.seed);
  Eigen::MatrixXd q(d, l);
  for (Eigen::Index j = 0; j < l; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) q(i, j) = rng.normal();
  }
  auto orthonormalize = [](const Eigen::MatrixXd& y) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    return Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols()));
  };
  q = orthonormalize(q);
  for (std::size_t it = 0; it < opt.power_iterations; ++it) {
    q = orthonormalize(x.transpose() * (x * q));
  }
  const double denom = static_cast<double>(x.rows() - 1);
  Eigen::MatrixXd b = x * q;
  Eigen::MatrixXd small = (b.transpose() * b) / denom;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(small);
  EigenPairs out{Eigen::VectorXd(m), Eigen::MatrixXd(d, m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    out.values(i) = solver.eigenvalues()(l - 1 - i);
    out.vectors.col(i) = q * solver.eigenvectors().col(l - 1 - i);
  }
  // re-orthonormalize against round-off in the rotation
  out.vectors = complete_orthonormal(orthonormalize(out.vectors), m);
  return out;
}

}  // namespace detail

/// Fits principal axes of the centered sample covariance (n - 1 normalization).
inline PcaModel fit_pca(std::span<const DenseVector> points, const PcaTarget& target,
                        const PcaOptions& options = {}) {
  if (points.size() < 2) throw InsufficientDataError("PCA needs at least 2 points");
  const DenseVector mean = mean_vector(points);
  const std::size_t d = mean.dim();
  const auto m = static_cast<Eigen::Index>(resolve_component_count(target, d));
  const Eigen::MatrixXd x = detail::centered_matrix(points, mean);
  const double total = x.squaredNorm() / static_cast<double>(points.size() - 1);

  detail::EigenPairs pairs;
  if (d <= options.exact_dim_limit) {
    pairs = detail::top_eigen_exact(x, m);
  } else if (points.size() <= options.exact_dim_limit) {
    pairs = detail::top_eigen_gram(x, m);
  } else {
    pairs = detail::top_eigen_randomized(x, m, options);
  }

  PcaModel model{mean, {}, {}};
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::VectorXd axis = pairs.vectors.col(i);
    detail::canonical_sign(axis);
    model.components.emplace_back(std::vector<double>(axis.data(), axis.data() + axis.size()));
    const double lambda = std::max(pairs.values(i), 0.0);
    model.explained_variance_ratio.push_back(total > 0.0 ? std::min(lambda / total, 1.0) : 0.0);
  }
  return model;
}

inline PcaModel fit_pca(const Dataset& data, const PcaTarget& target, const PcaOptions& options = {}) {
  return fit_pca(data.points(), target, options);
}

inline DenseVector transform_pca(const PcaModel& model, const DenseVector& point) {
  require_same_dim(model.input_dim(), point.dim());
  std::vector<double> out(model.output_dim(), 0.0);
  for (std::size_t i = 0; i < model.components.size(); ++i) {
    const auto& axis = model.components[i];
    double dot = 0.0;
    for (std::size_t j = 0; j < point.dim(); ++j) dot += (point[j] - model.mean[j]) * axis[j];
    out[i] = dot;
  }
  return DenseVector(std::move(out));
}

/// Maps reduced coordinates back into the input space.
inline DenseVector inverse_transform_pca(const PcaModel& model, const DenseVector& reduced) {
  require_same_dim(model.output_dim(), reduced.dim());
  std::vector<double> out(model.mean.begin(), model.mean.end());
  for (std::size_t i = 0; i < model.components.size(); ++i) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += reduced[i] * model.components[i][j];
  }
  return DenseVector(std::move(out));
}

inline double explained_variation(const PcaModel& model) {
  double sum = 0.0;
  for (double r : model.explained_variance_ratio) sum += r;
  return std::min(sum, 1.0);
}

}  // namespace aqkm
