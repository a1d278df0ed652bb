// Independent reference routines used only by tests. Nothing here calls
// into the library code paths it is used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

inline double dist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

/// Cyclic Jacobi eigenvalue iteration on a symmetric matrix. Returns
/// (eigenvalues, eigenvectors as rows), sorted by descending eigenvalue.
inline std::pair<Vec, Mat> jacobi_eigen(Mat a, int max_sweeps = 100) {
  const std::size_t n = a.size();
  Mat v(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
  Vec values;
  Mat vectors;
  for (std::size_t i : order) {
    values.push_back(a[i][i]);
    Vec col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v[k][i];
    vectors.push_back(col);
  }
  return {values, vectors};
}

/// Sample covariance with n - 1 normalization.
inline Mat covariance(const Mat& rows) {
  const std::size_t n = rows.size(), d = rows.front().size();
  Vec mean(d, 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < d; ++j) mean[j] += r[j] / static_cast<double>(n);
  Mat c(d, Vec(d, 0.0));
  for (const auto& r : rows)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) c[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
  for (auto& row : c)
    for (double& x : row) x /= static_cast<double>(n - 1);
  return c;
}

/// Exhaustive Penalized Min-Max argmax: for every unselected candidate,
/// scan every seed, then take the max with lowest-index tie-break.
inline std::size_t brute_select(const Mat& points, const std::vector<std::size_t>& seed_index,
                                const std::vector<std::string>& seed_label, double (*penalty)(std::size_t)) {
  std::map<std::string, std::size_t> counts;
  for (const auto& l : seed_label) ++counts[l];
  std::size_t best = std::numeric_limits<std::size_t>::max();
  double best_score = -1.0;
  for (std::size_t c = 0; c < points.size(); ++c) {
    if (std::find(seed_index.begin(), seed_index.end(), c) != seed_index.end()) continue;
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < seed_index.size(); ++s) {
      m = std::min(m, penalty(counts[seed_label[s]]) * dist(points[seed_index[s]], points[c]));
    }
    if (m > best_score) {
      best_score = m;
      best = c;
    }
  }
  return best;
}

inline std::size_t brute_nearest(const Vec& p, const Mat& centroids) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < centroids.size(); ++j)
    if (dist(p, centroids[j]) < dist(p, centroids[best])) best = j;
  return best;
}

}  // namespace oracle
