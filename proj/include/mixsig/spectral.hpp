// Copyright 2026 The mixsig Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mixsig/core.hpp"

namespace mixsig {

/// m x C matrix of per-sample component probabilities; rows sum to one.
struct Responsibilities {
  Matrix W;

  Index samples() const { return W.rows(); }
  Index components() const { return W.cols(); }

  /// Row argmax, lowest index on ties.
  std::vector<int> hard_labels() const {
    std::vector<int> out(W.rows());
    for (Index l = 0; l < W.rows(); ++l) {
      Index arg = 0;
      for (Index c = 1; c < W.cols(); ++c)
        if (W(l, c) > W(l, arg)) arg = c;
      out[l] = static_cast<int>(arg);
    }
    return out;
  }
};

/**
 * Rows of the top-C eigenvectors of Y^T Y, i.e. one C-dimensional point per
 * signal. Columns belonging to zero eigenvalues (rank-deficient Y) are zero.
 *
 * For m <= 4n the m x m Gram matrix is diagonalized directly; otherwise the
 * right singular vectors of Y are used.
 */
inline Matrix signal_embedding(const Matrix& Y, Index C) {
  const Index n = Y.rows();
  const Index m = Y.cols();
  require(C >= 1 && m >= C, "signal_embedding requires m >= C >= 1");

  Matrix vecs(m, C);
  Vector vals(C);
  Index available = 0;
  if (m <= 4 * n) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(Y.transpose() * Y);
    if (es.info() != Eigen::Success)
      throw NumericalError("Gram eigendecomposition failed");
    available = std::min(C, m);
    for (Index c = 0; c < available; ++c) {
      vals(c) = es.eigenvalues()(m - 1 - c);
      vecs.col(c) = es.eigenvectors().col(m - 1 - c);
    }
  } else {
    Eigen::BDCSVD<Matrix> svd(Y, Eigen::ComputeThinV);
    const Index r = svd.singularValues().size();
    available = std::min(C, r);
    for (Index c = 0; c < available; ++c) {
      vals(c) = svd.singularValues()(c) * svd.singularValues()(c);
      vecs.col(c) = svd.matrixV().col(c);
    }
  }
  const double top = available > 0 ? std::max(vals(0), 0.0) : 0.0;
  const double floor =
      top * static_cast<double>(std::max(n, m)) *
      std::numeric_limits<double>::epsilon();
  for (Index c = 0; c < C; ++c) {
    if (c >= available || vals(c) <= floor || top == 0.0) {
      vecs.col(c).setZero();
    } else {
      fix_sign(vecs.col(c));
    }
  }
  return vecs;
}

struct KMeansOptions {
  int restarts = 10;
  int max_iter = 100;
};

struct KMeansResult {
  std::vector<int> labels;
  Matrix centroids;  // C x d, one centroid per row
  double wcss = 0.0;
  int iterations = 0;
};

namespace detail {

inline double sq_dist(const Matrix& pts, Index i, const Matrix& cents, Index c) {
  return (pts.row(i) - cents.row(c)).squaredNorm();
}

// k-means++ seeding. Falls back to uniform choice when every remaining point
// coincides with a chosen centre.
inline Matrix kmeanspp_seed(const Matrix& pts, Index C, Rng& rng) {
  const Index m = pts.rows();
  Matrix cents(C, pts.cols());
  cents.row(0) = pts.row(uniform_index(rng, m));
  Vector d2(m);
  for (Index i = 0; i < m; ++i) d2(i) = sq_dist(pts, i, cents, 0);
  for (Index c = 1; c < C; ++c) {
    const double total = d2.sum();
    Index pick = 0;
    if (total > 0.0) {
      const double target = uniform(rng) * total;
      double acc = 0.0;
      pick = m - 1;
      for (Index i = 0; i < m; ++i) {
        acc += d2(i);
        if (acc > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = uniform_index(rng, m);
    }
    cents.row(c) = pts.row(pick);
    for (Index i = 0; i < m; ++i)
      d2(i) = std::min(d2(i), sq_dist(pts, i, cents, c));
  }
  return cents;
}

inline KMeansResult lloyd(const Matrix& pts, Index C, int max_iter, Rng& rng) {
  const Index m = pts.rows();
  KMeansResult res;
  res.centroids = kmeanspp_seed(pts, C, rng);
  res.labels.assign(m, -1);

  auto assign = [&]() {
    bool changed = false;
    for (Index i = 0; i < m; ++i) {
      int best = 0;
      double bd = sq_dist(pts, i, res.centroids, 0);
      for (Index c = 1; c < C; ++c) {
        const double d = sq_dist(pts, i, res.centroids, c);
        if (d < bd) {
          bd = d;
          best = static_cast<int>(c);
        }
      }
      if (res.labels[i] != best) changed = true;
      res.labels[i] = best;
    }
    return changed;
  };

  // Moves the point farthest from its centroid into each empty cluster, never
  // emptying a donor cluster.
  auto repair = [&]() {
    std::vector<Index> sizes(C, 0);
    for (int l : res.labels) ++sizes[l];
    for (Index c = 0; c < C; ++c) {
      if (sizes[c] > 0) continue;
      Index far = -1;
      double fd = -1.0;
      for (Index i = 0; i < m; ++i) {
        if (sizes[res.labels[i]] <= 1) continue;
        const double d = sq_dist(pts, i, res.centroids, res.labels[i]);
        if (d > fd) {
          fd = d;
          far = i;
        }
      }
      if (far < 0) break;
      --sizes[res.labels[far]];
      res.labels[far] = static_cast<int>(c);
      ++sizes[c];
      res.centroids.row(c) = pts.row(far);
    }
  };

  auto update = [&]() {
    Matrix sums = Matrix::Zero(C, pts.cols());
    std::vector<Index> counts(C, 0);
    for (Index i = 0; i < m; ++i) {
      sums.row(res.labels[i]) += pts.row(i);
      ++counts[res.labels[i]];
    }
    for (Index c = 0; c < C; ++c)
      if (counts[c] > 0) res.centroids.row(c) = sums.row(c) / counts[c];
  };

  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it + 1;
    const bool changed = assign();
    repair();
    update();
    if (!changed && it > 0) break;
  }
  res.wcss = 0.0;
  for (Index i = 0; i < m; ++i)
    res.wcss += sq_dist(pts, i, res.centroids, res.labels[i]);
  return res;
}

}  // namespace detail

/**
 * Lloyd's algorithm with k-means++ seeding; keeps the restart with the lowest
 * within-cluster sum of squares (earliest restart on ties). Each restart
 * draws from its own stream derived from one draw of rng.
 */
inline KMeansResult kmeans(const Matrix& points, Index C,
                           const KMeansOptions& opts, Rng& rng) {
  require(C >= 1 && points.rows() >= C, "kmeans requires m >= C >= 1");
  require(opts.restarts >= 1 && opts.max_iter >= 1,
          "kmeans needs positive restarts and max_iter");
  const std::uint64_t base = rng();
  KMeansResult best;
  best.wcss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < opts.restarts; ++r) {
    Rng stream(derive_seed(base, static_cast<std::uint64_t>(r)));
    KMeansResult cur = detail::lloyd(points, C, opts.max_iter, stream);
    if (cur.wcss < best.wcss) best = std::move(cur);
  }
  return best;
}

/// Softmax of negative squared distances to each centroid.
inline Responsibilities soft_init(const Matrix& embedding,
                                  const Matrix& centroids) {
  require(embedding.cols() == centroids.cols(),
          "embedding and centroid dimensions differ");
  const Index m = embedding.rows();
  const Index C = centroids.rows();
  require(C >= 1, "need at least one centroid");
  Matrix W(m, C);
  for (Index l = 0; l < m; ++l) {
    for (Index c = 0; c < C; ++c)
      W(l, c) = -(embedding.row(l) - centroids.row(c)).squaredNorm();
    const double top = W.row(l).maxCoeff();
    W.row(l) = (W.row(l).array() - top).exp();
    W.row(l) /= W.row(l).sum();
  }
  return Responsibilities{std::move(W)};
}

/// Rows drawn uniformly from the probability simplex (Dirichlet(1, ..., 1)).
inline Responsibilities random_init(Index m, Index C, Rng& rng) {
  require(C >= 1 && m >= 0, "random_init requires C >= 1");
  Matrix W(m, C);
  std::exponential_distribution<double> expo(1.0);
  for (Index l = 0; l < m; ++l) {
    for (Index c = 0; c < C; ++c) W(l, c) = expo(rng);
    W.row(l) /= W.row(l).sum();
  }
  return Responsibilities{std::move(W)};
}

}  // namespace mixsig
