#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "aqkm/preprocess.hpp"
#include "oracles.hpp"

using namespace aqkm;

namespace {

std::vector<DenseVector> gaussian_rows(std::size_t n, std::size_t d, std::uint64_t seed,
                                       std::vector<double> scales = {}) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<DenseVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(d);
    for (std::size_t j = 0; j < d; ++j) v[j] = g(gen) * (scales.empty() ? 1.0 : scales[j]);
    out.emplace_back(std::move(v));
  }
  return out;
}

oracle::Mat as_rows(const std::vector<DenseVector>& pts) {
  oracle::Mat m;
  for (const auto& p : pts) m.emplace_back(p.begin(), p.end());
  return m;
}

double norm(const DenseVector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST(TfIdf, IdfExamples) {
  std::vector<TokenizedDocument> corpus{{"d1", {"x", "y"}, {}}, {"d2", {"x"}, {}}};
  const auto m = fit_tfidf(corpus);
  EXPECT_DOUBLE_EQ(m.idf()[*m.column("x")], 1.0);
  EXPECT_NEAR(m.idf()[*m.column("y")], 1.4054651081081644, 1e-15);
  EXPECT_EQ(m.doc_count(), 2u);
}

TEST(TfIdf, VocabularyByFirstOccurrence) {
  std::vector<TokenizedDocument> single{{"d", {"a", "a", "b"}, {}}};
  const auto m = fit_tfidf(single);
  EXPECT_EQ(m.vocabulary(), (std::vector<std::string>{"a", "b"}));
  std::vector<TokenizedDocument> corpus{{"1", {"z", "q"}, {}}, {"2", {}, {}}, {"3", {"q", "m", "z"}, {}}};
  EXPECT_EQ(fit_tfidf(corpus).vocabulary(), (std::vector<std::string>{"z", "q", "m"}));
}

TEST(TfIdf, EmptyCorpusThrows) {
  EXPECT_THROW(fit_tfidf(std::vector<TokenizedDocument>{}), EmptySetError);
  std::vector<TokenizedDocument> no_tokens{{"a", {}, {}}};
  EXPECT_THROW(fit_tfidf(no_tokens), EmptySetError);
}

TEST(TfIdf, TransformExamples) {
  std::vector<TokenizedDocument> corpus{{"d1", {"a", "b"}, {}}, {"d2", {"a", "c"}, {}}};
  const auto m = fit_tfidf(corpus);
  EXPECT_EQ(transform_tfidf(m, {"n", {"zzz", "yyy"}, {}}), DenseVector::zeros(3));

  const auto one = transform_tfidf(m, {"n", {"a"}, {}});
  EXPECT_EQ(one, (DenseVector{1.0, 0.0, 0.0}));

  const TfIdfModel hand({"a", "b"}, {1.0, 2.0}, 2);
  const auto v = transform_tfidf(hand, {"n", {"a", "a", "b"}, {}});
  EXPECT_NEAR(v[0], std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(v[1], std::sqrt(0.5), 1e-12);
}

TEST(TfIdf, OutputNormIsZeroOrOne) {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> tok(0, 30), len(0, 12);
  std::vector<TokenizedDocument> corpus;
  for (int d = 0; d < 40; ++d) {
    TokenizedDocument doc{std::to_string(d), {}, {}};
    for (int i = len(gen); i > 0; --i) doc.tokens.push_back("t" + std::to_string(tok(gen)));
    corpus.push_back(doc);
  }
  corpus.push_back({"anchor", {"t0"}, {}});
  const auto m = fit_tfidf(corpus);
  for (const auto& doc : corpus) {
    const double n = norm(transform_tfidf(m, doc));
    EXPECT_TRUE(n == 0.0 || std::abs(n - 1.0) < 1e-9) << n;
  }
}

TEST(FeatureHash, CollisionDemonstration) {
  EXPECT_EQ(feature_hash({1, 1, 1, 0, 0, 0}, 3), (DenseVector{1, 1, 1}));
  EXPECT_EQ(feature_hash({0, 0, 0, 1, 1, 1}, 3), (DenseVector{1, 1, 1}));
  const DenseVector v{0.5, -2, 9, 4};
  EXPECT_EQ(feature_hash(v, 4), v);
  EXPECT_THROW(feature_hash(v, 0), DomainError);
}

TEST(FeatureHash, ConservesSum) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> small(-50, 50);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + trial % 37);
    for (double& x : v) x = small(gen);  // integers: sums are exact
    const DenseVector in(v);
    const std::size_t target = 1 + static_cast<std::size_t>(trial) % 11;
    double before = 0.0, after = 0.0;
    for (double x : in) before += x;
    for (double x : feature_hash(in, target)) after += x;
    EXPECT_EQ(before, after);
  }
}

TEST(Pca, RankOneLine) {
  std::vector<DenseVector> pts;
  for (int i = -5; i <= 5; ++i) pts.push_back(DenseVector{double(i), double(i)});
  const auto m = fit_pca(pts, ComponentCount{2});
  EXPECT_NEAR(m.explained_variance_ratio[0], 1.0, 1e-12);
  EXPECT_NEAR(m.explained_variance_ratio[1], 0.0, 1e-12);
  EXPECT_NEAR(std::abs(m.components[0][0]), std::sqrt(0.5), 1e-12);
  const auto one = fit_pca(pts, ComponentCount{1});
  EXPECT_NEAR(explained_variation(one), 1.0, 1e-12);
}

TEST(Pca, IsotropicSampleMatchesJacobiOracle) {
  const auto pts = gaussian_rows(2000, 2, 17);
  const auto m = fit_pca(pts, ComponentCount{2});
  EXPECT_NEAR(m.explained_variance_ratio[0], 0.5, 0.1);
  EXPECT_NEAR(m.explained_variance_ratio[1], 0.5, 0.1);
  const auto [values, vectors] = oracle::jacobi_eigen(oracle::covariance(as_rows(pts)));
  const double total = values[0] + values[1];
  EXPECT_NEAR(m.explained_variance_ratio[0], values[0] / total, 1e-9);
  EXPECT_NEAR(m.explained_variance_ratio[1], values[1] / total, 1e-9);
}

TEST(Pca, HalfComponentsMatchOracleAndStayOrthonormal) {
  std::vector<double> scales;
  for (int j = 0; j < 12; ++j) scales.push_back(1.0 + 0.4 * j);
  const auto pts = gaussian_rows(300, 12, 23, scales);
  const auto m = fit_pca(pts, ComponentCount{6});
  const auto [values, vectors] = oracle::jacobi_eigen(oracle::covariance(as_rows(pts)));
  double total = 0.0, top = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    total += values[i];
    if (i < 6) top += values[i];
  }
  EXPECT_NEAR(explained_variation(m), top / total, 1e-9);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < 12; ++c) dot += m.components[i][c] * m.components[j][c];
      EXPECT_NEAR(dot, i == j ? 1.0 : 0.0, 1e-8);
    }
  }
  for (std::size_t i = 1; i < 6; ++i) EXPECT_LE(m.explained_variance_ratio[i], m.explained_variance_ratio[i - 1]);
}

TEST(Pca, FullRankExplainsEverything) {
  const auto pts = gaussian_rows(50, 5, 3);
  EXPECT_NEAR(explained_variation(fit_pca(pts, LevelFraction{1.0})), 1.0, 1e-9);
}

TEST(Pca, ExplainedVariationMonotoneInComponents) {
  const auto pts = gaussian_rows(80, 10, 99, {5, 4, 3, 3, 2, 2, 1, 1, 0.5, 0.1});
  double prev = 0.0;
  for (std::size_t m = 1; m <= 10; ++m) {
    const double ev = explained_variation(fit_pca(pts, ComponentCount{m}));
    EXPECT_GE(ev, prev - 1e-12);
    EXPECT_LE(ev, 1.0 + 1e-9);
    prev = ev;
  }
}

TEST(Pca, LevelResolvesToCeilOfFraction) {
  EXPECT_EQ(resolve_component_count(LevelFraction{0.05}, 100), 5u);
  EXPECT_EQ(resolve_component_count(LevelFraction{0.05}, 101), 6u);
  EXPECT_EQ(resolve_component_count(LevelFraction{0.01}, 15283), 153u);
  EXPECT_EQ(resolve_component_count(LevelFraction{0.001}, 10), 1u);
  EXPECT_THROW(resolve_component_count(LevelFraction{0.0}, 10), DomainError);
  EXPECT_THROW(resolve_component_count(LevelFraction{1.5}, 10), DomainError);
  EXPECT_THROW(resolve_component_count(ComponentCount{11}, 10), DomainError);
}

TEST(Pca, Errors) {
  std::vector<DenseVector> one{{1, 2}};
  EXPECT_THROW(fit_pca(one, ComponentCount{1}), InsufficientDataError);
  const auto m = fit_pca(gaussian_rows(10, 3, 1), ComponentCount{2});
  EXPECT_THROW(transform_pca(m, DenseVector{1, 2}), DimensionError);
}

TEST(Pca, TransformExamples) {
  const auto pts = gaussian_rows(40, 4, 8);
  const auto m = fit_pca(pts, ComponentCount{3});
  for (double x : transform_pca(m, m.mean)) EXPECT_EQ(x, 0.0);

  PcaModel identity{DenseVector::zeros(3), {{1, 0, 0}, {0, 1, 0}}, {0.5, 0.5}};
  EXPECT_EQ(transform_pca(identity, DenseVector{4, -2, 7}), (DenseVector{4, -2}));
}

TEST(Pca, ReconstructionErrorShrinksWithComponents) {
  const auto pts = gaussian_rows(60, 6, 41, {3, 2.5, 2, 1.5, 1, 0.5});
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t m = 1; m <= 6; ++m) {
    const auto model = fit_pca(pts, ComponentCount{m});
    double err = 0.0;
    for (const auto& p : pts) err += squared_distance(p, inverse_transform_pca(model, transform_pca(model, p)));
    EXPECT_LT(err, prev + 1e-9);
    prev = err;
  }
  EXPECT_NEAR(prev, 0.0, 1e-9);
}

TEST(Pca, WideDataRoutesAgreeWithExact) {
  // 30 points in 60 dims: exact covariance vs Gram route vs randomized route.
  const auto pts = gaussian_rows(30, 60, 77);
  const auto exact = fit_pca(pts, ComponentCount{8});
  const auto gram = fit_pca(pts, ComponentCount{8}, PcaOptions{.exact_dim_limit = 40});
  const auto rnd = fit_pca(pts, ComponentCount{8}, PcaOptions{.exact_dim_limit = 20, .power_iterations = 30});
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_NEAR(gram.explained_variance_ratio[i], exact.explained_variance_ratio[i], 1e-10);
    EXPECT_NEAR(rnd.explained_variance_ratio[i], exact.explained_variance_ratio[i], 1e-6);
    double dot = 0.0;
    for (std::size_t c = 0; c < 60; ++c) dot += gram.components[i][c] * exact.components[i][c];
    EXPECT_NEAR(std::abs(dot), 1.0, 1e-8);
  }
}

TEST(Pca, MoreComponentsThanRankStillOrthonormal) {
  // 4 points in 50 dims have rank 3 after centering; ask for 10 axes.
  const auto pts = gaussian_rows(4, 50, 5);
  for (std::size_t limit : {2000u, 10u}) {
    const auto m = fit_pca(pts, ComponentCount{10}, PcaOptions{.exact_dim_limit = limit});
    ASSERT_EQ(m.components.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i) {
      for (std::size_t j = 0; j < 10; ++j) {
        double dot = 0.0;
        for (std::size_t c = 0; c < 50; ++c) dot += m.components[i][c] * m.components[j][c];
        EXPECT_NEAR(dot, i == j ? 1.0 : 0.0, 1e-8);
      }
    }
    EXPECT_NEAR(explained_variation(m), 1.0, 1e-9);
  }
}
