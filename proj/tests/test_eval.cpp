#include <gtest/gtest.h>

#include <random>
#include <set>

#include "aqkm/eval.hpp"

using namespace aqkm;

using Labels = std::vector<std::string>;

TEST(Accuracy, Examples) {
  EXPECT_EQ(accuracy(Labels{"a", "b"}, Labels{"a", "b"}), 1.0);
  EXPECT_EQ(accuracy(Labels{"a", "a"}, Labels{"b", "b"}), 0.0);
  EXPECT_EQ(accuracy(Labels{"a", "b", "c", "a"}, Labels{"a", "b", "c", "c"}), 0.75);
  EXPECT_THROW(accuracy(Labels{}, Labels{}), EmptySetError);
  EXPECT_THROW(accuracy(Labels{"a"}, Labels{"a", "b"}), DimensionError);
}

TEST(Gini, Examples) {
  Labels seven;
  for (int c = 0; c < 7; ++c) seven.push_back("c" + std::to_string(c));
  EXPECT_NEAR(gini_index(seven), 6.0 / 7.0, 1e-12);
  EXPECT_NEAR(gini_index(seven), 0.857, 5e-4);
  EXPECT_EQ(gini_index(Labels{"x", "x", "x"}), 0.0);
  EXPECT_NEAR(gini_index(Labels{"a", "a", "b"}), 4.0 / 9.0, 1e-15);
  EXPECT_THROW(gini_index(Labels{}), EmptySetError);
}

TEST(Gini, MaxGini) {
  EXPECT_NEAR(max_gini(7), 0.8571428571428571, 1e-15);
  EXPECT_EQ(max_gini(1), 0.0);
  EXPECT_THROW(max_gini(0), DomainError);
}

TEST(Gini, BoundedByMaxAndExactOnlyWhenUniform) {
  std::mt19937_64 gen(13);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t k = 1 + gen() % 9;
    const std::size_t n = 1 + gen() % 60;
    Labels l;
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i < n; ++i) {
      l.push_back("c" + std::to_string(gen() % k));
      ++counts[l.back()];
    }
    const double g = gini_index(l);
    EXPECT_GE(g, 0.0);
    EXPECT_LT(g, 1.0);
    EXPECT_LE(g, max_gini(k));
    bool uniform = counts.size() == k;
    for (const auto& [_, c] : counts) uniform &= c == n / k;
    EXPECT_EQ(g == max_gini(k), uniform) << "n=" << n << " k=" << k;
  }
}

TEST(ClassificationReport, PerfectPredictions) {
  const Labels truth{"a", "b", "c", "a"};
  const auto r = classification_report(truth, truth, {"a", "b", "c"});
  EXPECT_EQ(r.accuracy, 1.0);
  for (const auto& m : r.per_class) {
    EXPECT_EQ(m.precision, 1.0);
    EXPECT_EQ(m.recall, 1.0);
    EXPECT_EQ(m.f1, 1.0);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j) {
        EXPECT_EQ(r.confusion.counts[i][j], 0u);
      }
    }
  }
}

TEST(ClassificationReport, HandTallied) {
  // truth:     a a a b b c
  // predicted: a a b b a a
  // a: TP 2, FP 2, FN 1 -> P 1/2, R 2/3, F1 4/7
  // b: TP 1, FP 1, FN 1 -> P 1/2, R 1/2, F1 1/2
  // c: TP 0, FP 0, FN 1 -> P 0 (never predicted), R 0, F1 0
  const Labels truth{"a", "a", "a", "b", "b", "c"};
  const Labels pred{"a", "a", "b", "b", "a", "a"};
  const auto r = classification_report(pred, truth, {"a", "b", "c"});
  EXPECT_NEAR(r.accuracy, 0.5, 1e-15);
  EXPECT_NEAR(r.per_class[0].precision, 0.5, 1e-15);
  EXPECT_NEAR(r.per_class[0].recall, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.per_class[0].f1, 4.0 / 7.0, 1e-15);
  EXPECT_NEAR(r.per_class[1].f1, 0.5, 1e-15);
  EXPECT_EQ(r.per_class[2].precision, 0.0);
  EXPECT_EQ(r.per_class[2].f1, 0.0);
  EXPECT_NEAR(r.macro_average.precision, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.macro_average.recall, (2.0 / 3.0 + 0.5) / 3.0, 1e-15);
  EXPECT_EQ(r.confusion.counts[0], (std::vector<std::size_t>{2, 1, 0}));
  EXPECT_EQ(r.confusion.counts[2], (std::vector<std::size_t>{1, 0, 0}));
  EXPECT_EQ(r.confusion.total(), truth.size());
  EXPECT_DOUBLE_EQ(static_cast<double>(r.confusion.trace()) / static_cast<double>(r.confusion.total()), r.accuracy);
  EXPECT_THROW(classification_report(Labels{"z"}, Labels{"a"}, {"a"}), DomainError);
}

TEST(GaussianMixture, DegenerateSpreadCollapsesToMeans) {
  const auto d = make_gaussian_mixture({{1, 2}, {-3, 4}}, {1e-12, 1e-12}, {5, 5}, 1);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const DenseVector mean = i < 5 ? DenseVector{1, 2} : DenseVector{-3, 4};
    EXPECT_LT(euclidean_distance(d.point(i), mean), 1e-9);
  }
  EXPECT_THROW(make_gaussian_mixture({{0}}, {0.0}, {3}, 1), DomainError);
  EXPECT_THROW(make_gaussian_mixture({{0}}, {1.0}, {0}, 1), DomainError);
  EXPECT_THROW(make_gaussian_mixture({{0}, {0, 1}}, {1, 1}, {1, 1}, 1), DimensionError);
}

TEST(GaussianMixture, SampleMeansWithinCltBound) {
  const std::vector<std::vector<double>> means{{0, 0, 0}, {5, -5, 2}, {-3, 8, 1}};
  const std::vector<double> sd{1.0, 2.0, 0.5};
  const std::size_t n = 400;
  const auto d = make_gaussian_mixture(means, sd, {n, n, n}, 21);
  for (std::size_t c = 0; c < 3; ++c) {
    std::vector<DenseVector> members(d.points().begin() + static_cast<long>(c * n),
                                     d.points().begin() + static_cast<long>((c + 1) * n));
    const auto m = mean_vector(members);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_LT(std::abs(m[j] - means[c][j]), 4 * sd[c] / std::sqrt(double(n)));
  }
}

TEST(GaussianMixture, SameSeedIsBitIdentical) {
  const auto a = make_gaussian_mixture({{0, 0}, {3, 3}}, {1, 1}, {50, 50}, 77);
  const auto b = make_gaussian_mixture({{0, 0}, {3, 3}}, {1, 1}, {50, 50}, 77);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.point(i), b.point(i));
  const auto c = make_gaussian_mixture({{0, 0}, {3, 3}}, {1, 1}, {50, 50}, 78);
  EXPECT_NE(a.point(0), c.point(0));
}

TEST(TrainTestSplit, DeterministicPartition) {
  const auto d = make_gaussian_mixture({{0}, {9}}, {1, 1}, {50, 50}, 4);
  const auto [train, test] = train_test_split(d, 0.2, 10);
  EXPECT_EQ(test.size(), 20u);
  EXPECT_EQ(train.size(), 80u);
  std::set<std::string> ids;
  for (const auto& id : train.ids()) ids.insert(id);
  for (const auto& id : test.ids()) ids.insert(id);
  EXPECT_EQ(ids.size(), 100u);
  const auto [train2, test2] = train_test_split(d, 0.2, 10);
  EXPECT_TRUE(std::equal(test.ids().begin(), test.ids().end(), test2.ids().begin()));
}

TEST(Baseline, MostFrequentClass) {
  EXPECT_NEAR(most_frequent_class_accuracy(Labels{"a", "b", "a", "c"}), 0.5, 1e-15);
}
