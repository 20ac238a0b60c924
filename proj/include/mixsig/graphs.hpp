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
#include <numeric>
#include <string>
#include <vector>

#include "mixsig/core.hpp"

namespace mixsig {

/**
 * Undirected graph on nodes {0, ..., n-1} stored as a dense symmetric
 * adjacency matrix with zero diagonal and nonnegative weights.
 *
 * core_set holds the core nodes of a generated core-periphery graph, sorted
 * ascending. It is empty for graphs loaded from an adjacency matrix.
 */
struct Graph {
  Matrix adjacency;
  std::vector<Index> core_set;

  Index n() const { return adjacency.rows(); }

  /// Validates symmetry, zero diagonal and nonnegativity.
  static Graph from_adjacency(Matrix adjacency,
                              std::vector<Index> core_set = {}) {
    require(adjacency.rows() == adjacency.cols(),
            "adjacency must be square");
    const Index n = adjacency.rows();
    for (Index i = 0; i < n; ++i) {
      require(adjacency(i, i) == 0.0, "adjacency diagonal must be zero");
      for (Index j = 0; j < i; ++j) {
        require(adjacency(i, j) == adjacency(j, i),
                "adjacency must be symmetric");
        require(adjacency(i, j) >= 0.0, "adjacency must be nonnegative");
      }
    }
    for (Index c : core_set) require(c >= 0 && c < n, "core node out of range");
    std::sort(core_set.begin(), core_set.end());
    return Graph{std::move(adjacency), std::move(core_set)};
  }
};

/// Eigenpairs of a symmetric matrix, eigenvalues sorted descending. Every
/// eigenvector has its largest-magnitude entry positive.
struct Spectrum {
  Vector eigenvalues;
  Matrix eigenvectors;
};

/// Number of undirected edges (nonzero upper-triangular entries).
inline Index edge_count(const Graph& g) {
  Index count = 0;
  for (Index j = 0; j < g.n(); ++j)
    for (Index i = 0; i < j; ++i)
      if (g.adjacency(i, j) != 0.0) ++count;
  return count;
}

inline bool is_connected(const Graph& g) {
  const Index n = g.n();
  if (n <= 1) return true;
  std::vector<char> seen(n, 0);
  std::vector<Index> stack{0};
  seen[0] = 1;
  Index reached = 1;
  while (!stack.empty()) {
    const Index u = stack.back();
    stack.pop_back();
    for (Index v = 0; v < n; ++v) {
      if (!seen[v] && g.adjacency(u, v) != 0.0) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == n;
}

/**
 * Two-block stochastic block model with a fully connected core.
 *
 * core_size nodes are drawn uniformly without replacement. Core-core pairs
 * are always joined, core-periphery pairs with probability p_core_periph and
 * periphery-periphery pairs with probability p_periph. Edge weights are 1.
 */
inline Graph generate_cp_graph(Index n, Index core_size, double p_core_periph,
                               double p_periph, Rng& rng) {
  require(n >= 1, "n must be positive");
  require(core_size >= 1 && core_size <= n, "core_size must lie in [1, n]");
  require(p_core_periph >= 0.0 && p_core_periph <= 1.0,
          "p_core_periph must lie in [0, 1]");
  require(p_periph >= 0.0 && p_periph <= 1.0, "p_periph must lie in [0, 1]");

  // Partial Fisher-Yates: the first core_size entries form a uniform subset.
  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = 0; i < core_size; ++i) {
    const Index j = i + uniform_index(rng, n - i);
    std::swap(perm[i], perm[j]);
  }
  std::vector<Index> core(perm.begin(), perm.begin() + core_size);
  std::vector<char> is_core(n, 0);
  for (Index c : core) is_core[c] = 1;

  Matrix adj = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      const int cores = is_core[i] + is_core[j];
      bool edge = false;
      if (cores == 2) {
        edge = true;
      } else {
        const double p = cores == 1 ? p_core_periph : p_periph;
        edge = uniform(rng) < p;
      }
      if (edge) adj(i, j) = adj(j, i) = 1.0;
    }
  }
  std::sort(core.begin(), core.end());
  return Graph{std::move(adj), std::move(core)};
}

inline Spectrum spectrum(const Matrix& sym) {
  const Index n = sym.rows();
  Spectrum out;
  if (n == 0) return out;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success)
    throw NumericalError("symmetric eigendecomposition failed");
  // Eigen sorts ascending.
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = es.eigenvectors().rowwise().reverse();
  for (Index i = 0; i < n; ++i) fix_sign(out.eigenvectors.col(i));
  return out;
}

inline Spectrum spectrum(const Graph& g) { return spectrum(g.adjacency); }

/// Top eigenvector of the adjacency, unit norm, largest entry positive.
inline Vector eigen_centrality(const Graph& g) {
  require(g.n() >= 1, "empty graph");
  if (!is_connected(g))
    warn("eigen_centrality: graph is disconnected; the top eigenvector may "
         "be supported on one component");
  return spectrum(g).eigenvectors.col(0);
}

/// Number of shared core nodes between two graphs.
inline Index core_overlap(const Graph& a, const Graph& b) {
  std::vector<Index> common;
  std::set_intersection(a.core_set.begin(), a.core_set.end(),
                        b.core_set.begin(), b.core_set.end(),
                        std::back_inserter(common));
  return static_cast<Index>(common.size());
}

}  // namespace mixsig
