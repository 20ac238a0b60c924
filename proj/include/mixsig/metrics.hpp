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
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "mixsig/core.hpp"

namespace mixsig {

/**
 * Normalized mutual information I(a;b) / sqrt(H(a) H(b)) with natural-log
 * entropies of the empirical label distributions. Labels may be arbitrary
 * integers. If both labelings have a single class the result is 1; if only
 * one does, 0.
 */
inline double nmi(std::span<const int> a, std::span<const int> b) {
  require(a.size() == b.size(), "nmi: label vectors differ in length");
  require(!a.empty(), "nmi: empty label vectors");
  if (std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end()))
    std::swap(a, b);
  const double m = static_cast<double>(a.size());

  std::map<int, int> ia, ib;
  for (int v : a) ia.emplace(v, static_cast<int>(ia.size()));
  for (int v : b) ib.emplace(v, static_cast<int>(ib.size()));
  // Re-number in sorted label order so the summation order is fixed.
  int next = 0;
  for (auto& kv : ia) kv.second = next++;
  next = 0;
  for (auto& kv : ib) kv.second = next++;

  const Index ka = static_cast<Index>(ia.size());
  const Index kb = static_cast<Index>(ib.size());
  if (ka == 1 && kb == 1) return 1.0;
  if (ka == 1 || kb == 1) return 0.0;

  Matrix joint = Matrix::Zero(ka, kb);
  for (std::size_t l = 0; l < a.size(); ++l) joint(ia[a[l]], ib[b[l]]) += 1.0;
  const Vector ra = joint.rowwise().sum();
  const Eigen::RowVectorXd rb = joint.colwise().sum();

  auto entropy = [m](const auto& counts) {
    double h = 0.0;
    for (Index i = 0; i < counts.size(); ++i) {
      const double p = counts(i) / m;
      if (p > 0.0) h -= p * std::log(p);
    }
    return h;
  };
  const double ha = entropy(ra);
  const double hb = entropy(rb);

  double mi = 0.0;
  for (Index i = 0; i < ka; ++i) {
    for (Index j = 0; j < kb; ++j) {
      const double nij = joint(i, j);
      if (nij == 0.0) continue;
      mi += (nij / m) * std::log(nij * m / (ra(i) * rb(j)));
    }
  }
  const double v = mi / std::sqrt(ha * hb);
  return std::clamp(v, 0.0, 1.0);
}

/**
 * Permutation perm maximizing sum_c score(c, perm[c]); score rows index the
 * reference components, columns the estimated ones. Exhaustive for C <= 10
 * with ties broken toward the lexicographically smallest permutation;
 * greedy largest-entry matching beyond that.
 */
inline std::vector<int> best_permutation(const Matrix& score) {
  require(score.rows() == score.cols(), "score matrix must be square");
  const Index C = score.rows();
  std::vector<int> perm(C);
  std::iota(perm.begin(), perm.end(), 0);
  if (C <= 10) {
    std::vector<int> best = perm;
    double best_val = -std::numeric_limits<double>::infinity();
    do {
      double v = 0.0;
      for (Index c = 0; c < C; ++c) v += score(c, perm[c]);
      if (v > best_val) {
        best_val = v;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  std::vector<char> row_used(C, 0), col_used(C, 0);
  for (Index step = 0; step < C; ++step) {
    Index bi = -1, bj = -1;
    double bv = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < C; ++i) {
      if (row_used[i]) continue;
      for (Index j = 0; j < C; ++j) {
        if (col_used[j]) continue;
        if (score(i, j) > bv) {
          bv = score(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    row_used[bi] = col_used[bj] = 1;
    perm[bi] = static_cast<int>(bj);
  }
  return perm;
}

/// Contingency counts: entry (c, c') counts samples with truth c, estimate c'.
inline Matrix label_agreement(std::span<const int> truth,
                              std::span<const int> estimate, Index C) {
  require(truth.size() == estimate.size(), "label vectors differ in length");
  Matrix out = Matrix::Zero(C, C);
  for (std::size_t l = 0; l < truth.size(); ++l) {
    require(truth[l] >= 0 && truth[l] < C && estimate[l] >= 0 &&
                estimate[l] < C,
            "label out of range");
    out(truth[l], estimate[l]) += 1.0;
  }
  return out;
}

inline std::vector<int> best_permutation(std::span<const int> truth,
                                         std::span<const int> estimate,
                                         Index C) {
  return best_permutation(label_agreement(truth, estimate, C));
}

/// Indices of the top_k entries by magnitude, ties broken by lower index.
inline std::vector<Index> top_k_nodes(const Vector& v, Index top_k) {
  require(top_k >= 0 && top_k <= v.size(), "top_k out of range");
  std::vector<Index> idx(v.size());
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index i, Index j) {
    return std::abs(v(i)) > std::abs(v(j));
  });
  idx.resize(top_k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

/// Overlap counts: entry (c, c') is |true_core[c] ∩ top_k(est[c'])|.
inline Matrix core_overlap_matrix(std::span<const Vector> estimates,
                                  std::span<const std::vector<Index>> cores,
                                  Index top_k) {
  require(estimates.size() == cores.size(),
          "need one estimate per true core set");
  const Index C = static_cast<Index>(cores.size());
  std::vector<std::vector<Index>> detected;
  detected.reserve(C);
  for (const Vector& v : estimates) detected.push_back(top_k_nodes(v, top_k));
  Matrix out(C, C);
  for (Index c = 0; c < C; ++c) {
    std::vector<Index> truth = cores[c];
    std::sort(truth.begin(), truth.end());
    for (Index e = 0; e < C; ++e) {
      std::vector<Index> common;
      std::set_intersection(truth.begin(), truth.end(), detected[e].begin(),
                            detected[e].end(), std::back_inserter(common));
      out(c, e) = static_cast<double>(common.size());
    }
  }
  return out;
}

inline std::vector<int> best_permutation(
    std::span<const Vector> estimates,
    std::span<const std::vector<Index>> cores, Index top_k) {
  return best_permutation(core_overlap_matrix(estimates, cores, top_k));
}

/**
 * 1 - (1/C) sum_c |V_c ∩ Vhat_perm(c)| / top_k under the best matching of
 * estimated to true components, where Vhat is the top_k nodes by
 * |centrality|.
 */
inline double centrality_error_rate(std::span<const Vector> estimates,
                                    std::span<const std::vector<Index>> cores,
                                    Index top_k) {
  require(!cores.empty(), "need at least one component");
  require(top_k >= 1, "top_k must be positive");
  for (const auto& core : cores)
    require(static_cast<Index>(core.size()) == top_k,
            "true core sets must have top_k nodes");
  const Matrix overlap = core_overlap_matrix(estimates, cores, top_k);
  const std::vector<int> perm = best_permutation(overlap);
  double hit = 0.0;
  for (Index c = 0; c < overlap.rows(); ++c) hit += overlap(c, perm[c]);
  const double C = static_cast<double>(overlap.rows());
  return 1.0 - hit / (C * static_cast<double>(top_k));
}

}  // namespace mixsig
