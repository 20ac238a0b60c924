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

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "mixsig/core.hpp"
#include "mixsig/filters.hpp"
#include "mixsig/graphs.hpp"

namespace mixsig {

struct ExcitationBasis {
  Matrix B;
  double density = 0.0;
};

/// Everything used to synthesize a dataset; kept for evaluation only.
struct GroundTruth {
  std::vector<Graph> graphs;
  FilterSpec filter;
  Matrix B;
};

/**
 * Observed signals Y (n x m), excitation parameters Z (k x m) and the
 * generating identifier of every column. Identifiers are 0-based in memory
 * and 1-based in files.
 */
struct Dataset {
  Matrix Y;
  Matrix Z;
  std::vector<int> true_w;
  double sigma2 = 0.0;
  std::optional<GroundTruth> truth;

  Index m() const { return Y.cols(); }
};

namespace detail {

// Entries are Bernoulli(density) masks times Uniform[0.1, 1] magnitudes.
// Both draws are made for every entry so the stream layout does not depend
// on the density.
inline Matrix sparse_uniform(Index rows, Index cols, double density, Rng& rng) {
  Matrix out(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const bool keep = uniform(rng) < density;
      const double mag = uniform(rng, 0.1, 1.0);
      out(i, j) = keep ? mag : 0.0;
    }
  }
  return out;
}

}  // namespace detail

inline ExcitationBasis generate_basis(Index n, Index k, double density,
                                      Rng& rng) {
  require(k >= 1 && k <= n, "basis rank k must lie in [1, n]");
  require(density >= 0.0 && density <= 1.0, "density must lie in [0, 1]");
  return ExcitationBasis{detail::sparse_uniform(n, k, density, rng), density};
}

inline Matrix generate_excitations(Index k, Index m, double density, Rng& rng) {
  require(k >= 1 && m >= 1, "excitation shape must be positive");
  require(density >= 0.0 && density <= 1.0, "density must lie in [0, 1]");
  return detail::sparse_uniform(k, m, density, rng);
}

/**
 * Draws m = Z.cols() samples y = H(A^(w)) B z + e with w ~ P and
 * e ~ N(0, sigma2 I).
 */
inline Dataset sample_dataset(std::span<const Graph> graphs,
                              const FilterSpec& spec, const ExcitationBasis& basis,
                              const Matrix& Z, std::span<const double> P,
                              double sigma2, Rng& rng) {
  const auto C = static_cast<Index>(graphs.size());
  require(C >= 1, "need at least one graph");
  require(static_cast<Index>(P.size()) == C, "P must have one entry per graph");
  double total = 0.0;
  for (double p : P) {
    require(p >= 0.0, "P must be nonnegative");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12, "P must sum to 1");
  require(sigma2 >= 0.0, "sigma2 must be nonnegative");
  const Index n = graphs[0].n();
  require(basis.B.rows() == n, "B row count must equal node count");
  require(Z.rows() == basis.B.cols(), "Z row count must equal basis rank");
  for (const Graph& g : graphs) require(g.n() == n, "graphs must share nodes");

  std::vector<Matrix> mix(C);
  for (Index c = 0; c < C; ++c)
    mix[c] = apply_filter(spec, graphs[c]).matrix * basis.B;

  const Index m = Z.cols();
  std::discrete_distribution<int> pick(P.begin(), P.end());
  std::normal_distribution<double> noise(0.0, 1.0);
  const double sd = std::sqrt(sigma2);

  Dataset ds;
  ds.Y.resize(n, m);
  ds.Z = Z;
  ds.true_w.resize(m);
  ds.sigma2 = sigma2;
  for (Index l = 0; l < m; ++l) {
    const int w = pick(rng);
    ds.true_w[l] = w;
    ds.Y.col(l) = mix[w] * Z.col(l);
    for (Index i = 0; i < n; ++i) ds.Y(i, l) += sd * noise(rng);
  }
  ds.truth = GroundTruth{{graphs.begin(), graphs.end()}, spec, basis.B};
  return ds;
}

}  // namespace mixsig
