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

/**
 * Responsibility-weighted data averages for each component c:
 *
 *   Pbar[c]  = (1/m) sum_l W[l,c]
 *   YZbar[c] = (1/m) sum_l W[l,c] y_l z_l^T     (n x k)
 *   ZZbar[c] = (1/m) sum_l W[l,c] z_l z_l^T     (k x k, symmetric PSD)
 */
struct SuffStats {
  Vector Pbar;
  std::vector<Matrix> YZbar;
  std::vector<Matrix> ZZbar;

  Index components() const { return Pbar.size(); }
};

struct SolverConfig {
  int max_iter = 500;
  // Stop when |F_k - F_{k+1}| <= tol * |F_k|.
  double tol = 1e-12;
  bool acceleration = true;
};

/// One low-rank factor per component plus the shared sparse factor.
struct LowRankSparse {
  std::vector<Matrix> L;
  Matrix S;

  static LowRankSparse zeros(Index C, Index n, Index k) {
    return LowRankSparse{std::vector<Matrix>(C, Matrix::Zero(n, k)),
                         Matrix::Zero(n, k)};
  }
};

/**
 * min over (L_1..L_C, S) of
 *   (1/(2 sigma2)) sum_c [ Tr((L_c+S) ZZbar_c (L_c+S)^T) - 2 <L_c+S, YZbar_c> ]
 *   + lambda_L sum_c ||L_c||_* + lambda_S ||S||_1
 */
struct MStepProblem {
  SuffStats stats;
  double sigma2 = 1.0;
  double lambda_L = 3.0;
  double lambda_S = 0.3;

  void validate() const {
    require(sigma2 > 0.0, "sigma2 must be positive");
    require(lambda_L >= 0.0 && lambda_S >= 0.0,
            "regularization weights must be nonnegative");
    const Index C = stats.components();
    require(C >= 1, "need at least one component");
    require(static_cast<Index>(stats.YZbar.size()) == C &&
                static_cast<Index>(stats.ZZbar.size()) == C,
            "sufficient statistics have inconsistent component counts");
    const Index n = stats.YZbar[0].rows();
    const Index k = stats.YZbar[0].cols();
    for (Index c = 0; c < C; ++c) {
      require(stats.YZbar[c].rows() == n && stats.YZbar[c].cols() == k,
              "YZbar shapes differ");
      require(stats.ZZbar[c].rows() == k && stats.ZZbar[c].cols() == k,
              "ZZbar must be k x k");
    }
  }
};

struct MStepSolution {
  LowRankSparse x;
  std::vector<double> objective_trace;  // starts with the objective at init
  int iterations = 0;
};

/// Entrywise sign(M) * max(|M| - tau, 0).
inline Matrix soft_threshold(const Matrix& M, double tau) {
  require(tau >= 0.0, "threshold must be nonnegative");
  return M.unaryExpr([tau](double v) {
    const double a = std::abs(v) - tau;
    return a > 0.0 ? std::copysign(a, v) : 0.0;
  });
}

inline double nuclear_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(M);
  return svd.singularValues().sum();
}

namespace detail {

struct ShrinkResult {
  Matrix X;
  double nuclear = 0.0;  // nuclear norm of X
};

// Singular value shrinkage through the eigendecomposition of the smaller
// Gram matrix. For a tall M with M^T M = V diag(s^2) V^T,
//   svt(M, tau) = M V diag(max(0, 1 - tau/s)) V^T,
// which never forms U explicitly.
inline ShrinkResult shrink(const Matrix& M, double tau) {
  ShrinkResult out;
  if (M.size() == 0) {
    out.X = M;
    return out;
  }
  const bool tall = M.rows() >= M.cols();
  const Matrix gram = tall ? Matrix(M.transpose() * M) : Matrix(M * M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigendecomposition failed inside svt");
  const Vector& ev = es.eigenvalues();
  Vector factor(ev.size());
  for (Index i = 0; i < ev.size(); ++i) {
    const double s = std::sqrt(std::max(ev(i), 0.0));
    if (s > tau) {
      factor(i) = 1.0 - tau / s;
      out.nuclear += s - tau;
    } else {
      factor(i) = 0.0;
    }
  }
  const Matrix& V = es.eigenvectors();
  const Matrix proj = V * factor.asDiagonal() * V.transpose();
  out.X = tall ? Matrix(M * proj) : Matrix(proj * M);
  return out;
}

}  // namespace detail

/// Proximal operator of tau * nuclear norm.
inline Matrix svt(const Matrix& M, double tau) {
  require(tau >= 0.0, "threshold must be nonnegative");
  if (tau == 0.0) return M;
  return detail::shrink(M, tau).X;
}

/// Gradient of the smooth part of the M-step objective.
inline LowRankSparse mstep_gradient(const LowRankSparse& x,
                                    const SuffStats& stats, double sigma2) {
  const Index C = stats.components();
  require(static_cast<Index>(x.L.size()) == C, "L count must equal C");
  LowRankSparse g;
  g.L.resize(C);
  g.S = Matrix::Zero(x.S.rows(), x.S.cols());
  for (Index c = 0; c < C; ++c) {
    g.L[c] = ((x.L[c] + x.S) * stats.ZZbar[c] - stats.YZbar[c]) / sigma2;
    g.S += g.L[c];
  }
  return g;
}

/// Smooth part of the M-step objective (no constant term).
inline double mstep_smooth(const LowRankSparse& x, const SuffStats& stats,
                           double sigma2) {
  double acc = 0.0;
  for (Index c = 0; c < stats.components(); ++c) {
    const Matrix M = x.L[c] + x.S;
    acc += (M.cwiseProduct(M * stats.ZZbar[c] - 2.0 * stats.YZbar[c])).sum();
  }
  return acc / (2.0 * sigma2);
}

inline double mstep_objective(const MStepProblem& p, const LowRankSparse& x) {
  double reg = p.lambda_S * x.S.cwiseAbs().sum();
  if (p.lambda_L != 0.0)
    for (const Matrix& l : x.L) reg += p.lambda_L * nuclear_norm(l);
  return mstep_smooth(x, p.stats, p.sigma2) + reg;
}

/// Lipschitz bound of the joint gradient: (1 + C) max_c ||ZZbar_c||_2 / sigma2.
inline double mstep_lipschitz(const SuffStats& stats, double sigma2) {
  double top = 0.0;
  for (const Matrix& g : stats.ZZbar) {
    if (g.size() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    top = std::max(top, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return (1.0 + static_cast<double>(stats.components())) * top / sigma2;
}

/**
 * Accelerated proximal gradient with restart. A momentum step that raises the
 * objective is discarded and replaced by a plain proximal step from the last
 * iterate, so the returned trace never increases.
 */
inline MStepSolution solve_mstep(const MStepProblem& p, LowRankSparse init,
                                 const SolverConfig& cfg) {
  p.validate();
  require(cfg.max_iter >= 1 && cfg.tol > 0.0, "invalid solver configuration");
  const Index C = p.stats.components();
  const Index n = p.stats.YZbar[0].rows();
  const Index k = p.stats.YZbar[0].cols();
  require(static_cast<Index>(init.L.size()) == C, "init must have C factors");
  for (const Matrix& l : init.L)
    require(l.rows() == n && l.cols() == k, "init L shape mismatch");
  require(init.S.rows() == n && init.S.cols() == k, "init S shape mismatch");

  double lip = mstep_lipschitz(p.stats, p.sigma2);
  if (!(lip > 0.0)) lip = 1.0 / p.sigma2;
  const double step = 1.0 / lip;

  struct Point {
    LowRankSparse x;
    double f;
  };

  auto prox_step = [&](const LowRankSparse& y) -> Point {
    const LowRankSparse g = mstep_gradient(y, p.stats, p.sigma2);
    Point out;
    out.x.L.resize(C);
    double nuc = 0.0;
    for (Index c = 0; c < C; ++c) {
      const Matrix arg = y.L[c] - step * g.L[c];
      if (p.lambda_L == 0.0) {
        out.x.L[c] = arg;
      } else {
        detail::ShrinkResult r = detail::shrink(arg, p.lambda_L * step);
        out.x.L[c] = std::move(r.X);
        nuc += r.nuclear;
      }
    }
    out.x.S = soft_threshold(y.S - step * g.S, p.lambda_S * step);
    out.f = mstep_smooth(out.x, p.stats, p.sigma2) + p.lambda_L * nuc +
            p.lambda_S * out.x.S.cwiseAbs().sum();
    if (!std::isfinite(out.f))
      throw NumericalError("M-step objective is not finite");
    return out;
  };

  MStepSolution sol;
  Point cur{std::move(init), 0.0};
  cur.f = mstep_objective(p, cur.x);
  if (!std::isfinite(cur.f))
    throw NumericalError("M-step objective is not finite at init");
  sol.objective_trace.push_back(cur.f);

  LowRankSparse y = cur.x;
  double t = 1.0;
  for (int it = 0; it < cfg.max_iter; ++it) {
    sol.iterations = it + 1;
    Point next = prox_step(y);
    if (next.f > cur.f && cfg.acceleration) {
      t = 1.0;
      next = prox_step(cur.x);
    }
    if (next.f > cur.f) break;  // rounding-level increase: already converged

    const bool done = std::abs(cur.f - next.f) <= cfg.tol * std::abs(cur.f);
    if (cfg.acceleration) {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double beta = (t - 1.0) / t_next;
      y.L.resize(C);
      for (Index c = 0; c < C; ++c)
        y.L[c] = next.x.L[c] + beta * (next.x.L[c] - cur.x.L[c]);
      y.S = next.x.S + beta * (next.x.S - cur.x.S);
      t = t_next;
    } else {
      y = next.x;
    }
    cur = std::move(next);
    sol.objective_trace.push_back(cur.f);
    if (done) break;
  }
  sol.x = std::move(cur.x);
  return sol;
}

}  // namespace mixsig
