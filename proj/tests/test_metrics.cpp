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

std::vector<int> random_labels(std::size_t m, int classes, Rng& rng) {
  std::vector<int> out(m);
  for (int& v : out) v = static_cast<int>(uniform_index(rng, classes));
  return out;
}

Vector centrality_with_top(Index n, const std::vector<Index>& top) {
  Vector v = Vector::Constant(n, 0.01);
  for (std::size_t i = 0; i < top.size(); ++i) v(top[i]) = 1.0 - 0.01 * i;
  return v.normalized();
}

TEST(Nmi, IdenticalLabelings) {
  const std::vector<int> a{0, 1, 2, 2, 1, 0, 0};
  EXPECT_DOUBLE_EQ(nmi(a, a), 1.0);
}

TEST(Nmi, PermutedLabels) {
  EXPECT_DOUBLE_EQ(nmi(std::vector<int>{1, 1, 2, 2}, std::vector<int>{2, 2, 1, 1}), 1.0);
}

TEST(Nmi, IndependentLabels) {
  EXPECT_NEAR(nmi(std::vector<int>{1, 1, 2, 2}, std::vector<int>{1, 2, 1, 2}), 0.0, 1e-15);
}

TEST(Nmi, SingleClassConventions) {
  const std::vector<int> one{3, 3, 3};
  EXPECT_DOUBLE_EQ(nmi(one, one), 1.0);
  EXPECT_DOUBLE_EQ(nmi(one, std::vector<int>{0, 1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(nmi(std::vector<int>{0, 1, 1}, one), 0.0);
}

TEST(Nmi, RejectsBadInput) {
  EXPECT_THROW(nmi(std::vector<int>{0, 1}, std::vector<int>{0}), ParameterError);
  EXPECT_THROW(nmi(std::vector<int>{}, std::vector<int>{}), ParameterError);
}

TEST(Nmi, SymmetricRelabelInvariantAndBounded) {
  Rng rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    const auto a = random_labels(40, 3, rng);
    const auto b = random_labels(40, 4, rng);
    const double v = nmi(a, b);
    EXPECT_EQ(v, nmi(b, a));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    std::vector<int> relabeled(b);
    for (int& x : relabeled) x = 10 - 3 * x;
    EXPECT_NEAR(nmi(a, relabeled), v, 1e-14);
  }
}

TEST(Nmi, MatchesContingencyReference) {
  Rng rng(2);
  for (int rep = 0; rep < 100; ++rep) {
    const int ka = 2 + static_cast<int>(uniform_index(rng, 4));
    const auto a = random_labels(60, ka, rng);
    const auto b = random_labels(60, 3, rng);
    EXPECT_NEAR(nmi(a, b), testing::nmi_reference(a, b), 1e-12);
  }
}

TEST(CentralityErrorRate, PerfectAndDisjoint) {
  const std::vector<std::vector<Index>> cores{{0, 1, 2}, {5, 6, 7}};
  const std::vector<Vector> perfect{centrality_with_top(10, {0, 1, 2}),
                                    centrality_with_top(10, {5, 6, 7})};
  EXPECT_DOUBLE_EQ(centrality_error_rate(perfect, cores, 3), 0.0);
  const std::vector<Vector> disjoint{centrality_with_top(10, {3, 4, 8}),
                                     centrality_with_top(10, {3, 4, 9})};
  EXPECT_DOUBLE_EQ(centrality_error_rate(disjoint, cores, 3), 1.0);
}

TEST(CentralityErrorRate, HalfOverlap) {
  const std::vector<std::vector<Index>> cores{{0, 1, 2, 3}, {4, 5, 6, 7}};
  const std::vector<Vector> est{centrality_with_top(12, {0, 1, 2, 3}),
                                centrality_with_top(12, {4, 5, 8, 9})};
  EXPECT_DOUBLE_EQ(centrality_error_rate(est, cores, 4), 0.25);
}

TEST(CentralityErrorRate, InvariantToComponentOrderAndSign) {
  Rng rng(3);
  const std::vector<std::vector<Index>> cores{{0, 1, 2}, {3, 4, 5}, {6, 7, 8}};
  std::vector<Vector> est;
  for (int c = 0; c < 3; ++c) est.push_back(testing::random_matrix(12, 1, rng));
  const double base = centrality_error_rate(est, cores, 3);
  std::vector<Vector> rev(est.rbegin(), est.rend());
  rev[0] = -rev[0];
  EXPECT_DOUBLE_EQ(centrality_error_rate(rev, cores, 3), base);
}

TEST(CentralityErrorRate, RequiresCoreSizeTopK) {
  const std::vector<std::vector<Index>> cores{{0, 1}};
  const std::vector<Vector> est{Vector::Ones(4)};
  EXPECT_THROW(centrality_error_rate(est, cores, 3), ParameterError);
}

TEST(TopKNodes, TiesBrokenByIndex) {
  Vector v(5);
  v << 0.5, -0.5, 0.5, 0.1, 0.9;
  EXPECT_EQ(top_k_nodes(v, 3), (std::vector<Index>{0, 1, 4}));
}

TEST(BestPermutation, IdentityAndSwap) {
  const Matrix eye = Matrix::Identity(3, 3);
  EXPECT_EQ(best_permutation(eye), (std::vector<int>{0, 1, 2}));
  Matrix swap = Matrix::Zero(2, 2);
  swap(0, 1) = swap(1, 0) = 5.0;
  EXPECT_EQ(best_permutation(swap), (std::vector<int>{1, 0}));
}

TEST(BestPermutation, TiesPickLexicographicallySmallest) {
  EXPECT_EQ(best_permutation(Matrix::Ones(3, 3)), (std::vector<int>{0, 1, 2}));
}

TEST(BestPermutation, LabelAgreement) {
  const std::vector<int> truth{0, 0, 1, 1, 2, 2};
  const std::vector<int> est{2, 2, 0, 0, 1, 1};
  EXPECT_EQ(best_permutation(truth, est, 3), (std::vector<int>{2, 0, 1}));
}

TEST(BestPermutation, MatchesExhaustiveSearch) {
  Rng rng(4);
  for (Index C = 1; C <= 6; ++C) {
    for (int rep = 0; rep < 10; ++rep) {
      const Matrix score = testing::random_matrix(C, C, rng, 0.0, 1.0);
      std::vector<int> perm(C), best;
      std::iota(perm.begin(), perm.end(), 0);
      double best_val = -1;
      do {
        double v = 0;
        for (Index c = 0; c < C; ++c) v += score(c, perm[c]);
        if (v > best_val) {
          best_val = v;
          best = perm;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      EXPECT_EQ(best_permutation(score), best);
    }
  }
}

TEST(BestPermutation, GreedyBeyondTen) {
  Matrix score = Matrix::Zero(12, 12);
  for (Index c = 0; c < 12; ++c) score(c, (c + 5) % 12) = 1.0;
  const std::vector<int> perm = best_permutation(score);
  for (Index c = 0; c < 12; ++c) EXPECT_EQ(perm[c], (c + 5) % 12);
}

}  // namespace
}  // namespace mixsig
