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


#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "test_support.hpp"

namespace mixsig {
namespace {

using testing::complete_graph;
using testing::star_graph;

Index core_edges(const Graph& g) {
  Index count = 0;
  for (std::size_t a = 0; a < g.core_set.size(); ++a)
    for (std::size_t b = 0; b < a; ++b)
      if (g.adjacency(g.core_set[a], g.core_set[b]) == 1.0) ++count;
  return count;
}

TEST(CorePeripheryGraph, FullSizedInstanceHasCompleteCore) {
  Rng rng(7);
  const Graph g = generate_cp_graph(100, 10, 0.2, 0.05, rng);
  EXPECT_EQ(g.n(), 100);
  EXPECT_EQ(g.core_set.size(), 10u);
  EXPECT_EQ(core_edges(g), 45);
  EXPECT_TRUE(g.adjacency.isApprox(g.adjacency.transpose(), 0.0));
  EXPECT_EQ(g.adjacency.diagonal().cwiseAbs().sum(), 0.0);
  for (Index i = 0; i < g.n(); ++i)
    for (Index j = 0; j < g.n(); ++j)
      EXPECT_TRUE(g.adjacency(i, j) == 0.0 || g.adjacency(i, j) == 1.0);
}

TEST(CorePeripheryGraph, AllCoreIsComplete) {
  Rng rng(1);
  const Graph g = generate_cp_graph(5, 5, 0.3, 0.7, rng);
  EXPECT_EQ(edge_count(g), 10);
  EXPECT_TRUE(g.adjacency.isApprox(complete_graph(5).adjacency));
}

TEST(CorePeripheryGraph, EdgeCountMatchesBernoulliMoments) {
  const double periph = 190.0;
  const double mean = 45.0 + 0.2 * 10.0 * periph + 0.05 * periph * (periph - 1) / 2;
  const double var = 10.0 * periph * 0.2 * 0.8 +
                     periph * (periph - 1) / 2 * 0.05 * 0.95;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Rng rng(seed);
    const Graph g = generate_cp_graph(200, 10, 0.2, 0.05, rng);
    EXPECT_LE(std::abs(static_cast<double>(edge_count(g)) - mean),
              4.0 * std::sqrt(var));
  }
}

TEST(CorePeripheryGraph, CoreMembershipIsUniform) {
  Rng rng(11);
  std::vector<int> hits(20, 0);
  const int draws = 4000;
  for (int t = 0; t < draws; ++t)
    for (Index c : generate_cp_graph(20, 5, 0.0, 0.0, rng).core_set) ++hits[c];
  const double p = 5.0 / 20.0;
  for (int h : hits)
    EXPECT_LE(std::abs(h - draws * p), 4.0 * std::sqrt(draws * p * (1 - p)));
}

TEST(CorePeripheryGraph, RejectsInvalidParameters) {
  Rng rng(1);
  EXPECT_THROW(generate_cp_graph(10, 0, 0.2, 0.05, rng), ParameterError);
  EXPECT_THROW(generate_cp_graph(10, 11, 0.2, 0.05, rng), ParameterError);
  EXPECT_THROW(generate_cp_graph(10, 3, 1.2, 0.05, rng), ParameterError);
  EXPECT_THROW(generate_cp_graph(10, 3, 0.2, -0.1, rng), ParameterError);
}

TEST(CorePeripheryGraph, SameSeedSameGraph) {
  Rng a(42), b(42);
  const Graph ga = generate_cp_graph(60, 6, 0.2, 0.05, a);
  const Graph gb = generate_cp_graph(60, 6, 0.2, 0.05, b);
  EXPECT_EQ(ga.adjacency, gb.adjacency);
  EXPECT_EQ(ga.core_set, gb.core_set);
}

TEST(GraphValidation, RejectsMalformedAdjacency) {
  Matrix asym = Matrix::Zero(3, 3);
  asym(0, 1) = 1.0;
  EXPECT_THROW(Graph::from_adjacency(asym), ParameterError);
  Matrix diag = Matrix::Zero(3, 3);
  diag(1, 1) = 1.0;
  EXPECT_THROW(Graph::from_adjacency(diag), ParameterError);
  Matrix neg = Matrix::Zero(3, 3);
  neg(0, 2) = neg(2, 0) = -1.0;
  EXPECT_THROW(Graph::from_adjacency(neg), ParameterError);
  EXPECT_THROW(Graph::from_adjacency(Matrix::Zero(2, 3)), ParameterError);
}

TEST(Spectrum, CompleteGraph) {
  const Spectrum s = spectrum(complete_graph(5));
  EXPECT_NEAR(s.eigenvalues(0), 4.0, 1e-12);
  for (Index i = 1; i < 5; ++i) EXPECT_NEAR(s.eigenvalues(i), -1.0, 1e-12);
}

TEST(Spectrum, ZeroMatrix) {
  const Spectrum s = spectrum(Matrix::Zero(4, 4));
  EXPECT_EQ(s.eigenvalues.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Spectrum, ReconstructsRandomSymmetricMatrix) {
  Rng rng(3);
  const Matrix R = testing::random_matrix(6, 6, rng);
  const Matrix A = 0.5 * (R + R.transpose());
  const Spectrum s = spectrum(A);
  const Matrix rebuilt =
      s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose();
  EXPECT_LE((rebuilt - A).norm(), 1e-8);
}

TEST(Spectrum, InvariantsOnGeneratedGraph) {
  Rng rng(5);
  const Graph g = generate_cp_graph(100, 10, 0.2, 0.05, rng);
  const Spectrum s = spectrum(g);
  const double scale = g.adjacency.norm();
  for (Index i = 1; i < g.n(); ++i)
    EXPECT_GE(s.eigenvalues(i - 1), s.eigenvalues(i));
  for (Index i = 0; i < g.n(); ++i) {
    const Vector r = g.adjacency * s.eigenvectors.col(i) -
                     s.eigenvalues(i) * s.eigenvectors.col(i);
    EXPECT_LE(r.norm(), 1e-8 * scale);
  }
  const Matrix gram = s.eigenvectors.transpose() * s.eigenvectors;
  EXPECT_LE((gram - Matrix::Identity(g.n(), g.n())).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Spectrum, EigenvaluesInvariantUnderRelabeling) {
  Rng rng(9);
  const Graph g = generate_cp_graph(50, 5, 0.2, 0.05, rng);
  std::vector<Index> perm(50);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix P = Matrix::Zero(50, 50);
  for (Index i = 0; i < 50; ++i) P(i, perm[i]) = 1.0;
  const Matrix permuted = P * g.adjacency * P.transpose();
  const Vector a = spectrum(g).eigenvalues;
  const Vector b = spectrum(permuted).eigenvalues;
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(EigenCentrality, CompleteGraphIsUniform) {
  const Vector v = eigen_centrality(complete_graph(6));
  for (Index i = 0; i < 6; ++i) EXPECT_NEAR(v(i), 1.0 / std::sqrt(6.0), 1e-12);
}

TEST(EigenCentrality, Star) {
  const Vector v = eigen_centrality(star_graph(5));
  EXPECT_NEAR(v(0), 1.0 / std::sqrt(2.0), 1e-12);
  for (Index i = 1; i < 5; ++i) EXPECT_NEAR(v(i), 1.0 / std::sqrt(8.0), 1e-12);
  EXPECT_NEAR(spectrum(star_graph(5)).eigenvalues(0), 2.0, 1e-12);
}

TEST(EigenCentrality, PathOfTwo) {
  const Vector v = eigen_centrality(complete_graph(2));
  EXPECT_NEAR(v(0), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(v(1), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(EigenCentrality, UnitNormEigenvectorWithPositiveLeadingEntry) {
  Rng rng(12);
  const Graph g = generate_cp_graph(80, 8, 0.2, 0.05, rng);
  const Vector v = eigen_centrality(g);
  EXPECT_NEAR(v.norm(), 1.0, 1e-12);
  Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  EXPECT_GT(v(arg), 0.0);
  const double lambda = spectrum(g).eigenvalues(0);
  EXPECT_LE((g.adjacency * v - lambda * v).norm(), 1e-8 * g.adjacency.norm());
}

TEST(EigenCentrality, WarnsOnDisconnectedGraph) {
  std::vector<std::string> seen;
  const WarningSink saved = warning_sink();
  warning_sink() = [&](std::string_view m) { seen.emplace_back(m); };
  const Graph g = testing::disjoint_union(
      {complete_graph(3).adjacency, complete_graph(4).adjacency});
  const Vector v = eigen_centrality(g);
  warning_sink() = saved;
  ASSERT_EQ(seen.size(), 1u);
  EXPECT_NE(seen[0].find("disconnected"), std::string::npos);
  EXPECT_NEAR(v.norm(), 1.0, 1e-12);
}

TEST(CorePeripheryProperties, PositiveEigengapAndCentralCore) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const Graph g = generate_cp_graph(100, 10, 0.2, 0.05, rng);
    const Spectrum s = spectrum(g);
    EXPECT_GT(s.eigenvalues(0) - s.eigenvalues(1), 0.0) << "seed " << seed;

    const Vector v = s.eigenvectors.col(0).cwiseAbs();
    std::vector<char> core(100, 0);
    for (Index c : g.core_set) core[c] = 1;
    double core_sum = 0.0, periph_sum = 0.0;
    for (Index i = 0; i < 100; ++i) (core[i] ? core_sum : periph_sum) += v(i);
    EXPECT_GT(core_sum / 10.0, periph_sum / 90.0) << "seed " << seed;
  }
}

TEST(CoreOverlap, CountsSharedNodes) {
  const Graph a = Graph::from_adjacency(Matrix::Zero(6, 6), {0, 1, 2});
  const Graph b = Graph::from_adjacency(Matrix::Zero(6, 6), {2, 1, 5});
  EXPECT_EQ(core_overlap(a, b), 2);
}

}  // namespace
}  // namespace mixsig
