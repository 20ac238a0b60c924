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
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "mixsig/core.hpp"
#include "mixsig/solver.hpp"
#include "mixsig/spectral.hpp"

namespace mixsig {

/// Mixture parameters: low-rank factor per component, shared sparse factor,
/// component probabilities.
struct Theta {
  std::vector<Matrix> L;
  Matrix S;
  Vector P;

  Index components() const { return P.size(); }

  LowRankSparse factors() const { return LowRankSparse{L, S}; }
};

enum class InitKind { spectral, random, given };

struct EMConfig {
  int T_max = 100;
  double sigma2 = 0.01;
  double lambda_L = 3.0;
  double lambda_S = 0.3;
  SolverConfig solver;
  InitKind init = InitKind::spectral;
  std::optional<Responsibilities> given;
  KMeansOptions kmeans;
};

struct EMResult {
  Theta theta;
  Responsibilities W;
  std::vector<int> w_hat;
  std::vector<Vector> centralities;
  std::vector<double> objective_trace;
  int inner_iterations = 0;  // total proximal steps over all M-steps
};

/// Called after every outer round with the round index (1-based).
using EMObserver =
    std::function<void(int round, const Theta&, const Responsibilities&)>;

namespace detail {

inline void check_data(const Matrix& Y, const Matrix& Z) {
  require(Y.cols() == Z.cols(), "Y and Z must have the same column count");
  require(Y.cols() >= 1, "need at least one sample");
}

// log P_c - ||y_l - (S + L_c) z_l||^2 / (2 sigma2), one row per sample.
inline Matrix log_joint(const Theta& theta, const Matrix& Y, const Matrix& Z,
                        double sigma2) {
  const Index C = theta.components();
  Matrix out(Y.cols(), C);
  for (Index c = 0; c < C; ++c) {
    const double logp = theta.P(c) > 0.0
                            ? std::log(theta.P(c))
                            : -std::numeric_limits<double>::infinity();
    const Matrix resid = Y - (theta.S + theta.L[c]) * Z;
    out.col(c) =
        (logp - resid.colwise().squaredNorm().array() / (2.0 * sigma2))
            .transpose();
  }
  return out;
}

inline double log_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  const double top = row.maxCoeff();
  if (!std::isfinite(top)) return top;
  return top + std::log((row.array() - top).exp().sum());
}

}  // namespace detail

/**
 * Posterior component probabilities, computed in log space with the row
 * maximum subtracted. Entries are floored at 1e-300 and renormalized so no
 * component loses all mass.
 */
inline Responsibilities e_step(const Theta& theta, const Matrix& Y,
                               const Matrix& Z, double sigma2) {
  detail::check_data(Y, Z);
  require(sigma2 > 0.0, "sigma2 must be positive");
  require(theta.P.size() >= 1 && theta.P.maxCoeff() > 0.0,
          "component probabilities are all zero");
  Matrix W = detail::log_joint(theta, Y, Z, sigma2);
  for (Index l = 0; l < W.rows(); ++l) {
    const double top = W.row(l).maxCoeff();
    W.row(l) = (W.row(l).array() - top).exp();
    W.row(l) /= W.row(l).sum();
    W.row(l) = W.row(l).cwiseMax(1e-300);
    W.row(l) /= W.row(l).sum();
  }
  return Responsibilities{std::move(W)};
}

inline SuffStats sufficient_stats(const Responsibilities& resp, const Matrix& Y,
                                  const Matrix& Z) {
  detail::check_data(Y, Z);
  require(resp.samples() == Y.cols(), "responsibilities need one row per sample");
  const Index C = resp.components();
  const double inv_m = 1.0 / static_cast<double>(Y.cols());
  SuffStats st;
  st.Pbar.resize(C);
  st.YZbar.resize(C);
  st.ZZbar.resize(C);
  for (Index c = 0; c < C; ++c) {
    const auto w = resp.W.col(c);
    st.Pbar(c) = w.sum() * inv_m;
    const Matrix Zw = Z * w.asDiagonal();
    st.YZbar[c] = Y * Zw.transpose() * inv_m;
    Matrix zz = Zw * Z.transpose() * inv_m;
    st.ZZbar[c] = 0.5 * (zz + zz.transpose());
  }
  return st;
}

/// Closed-form P update followed by the proximal solve for (L, S), warm
/// started at `warm`.
inline Theta m_step(const SuffStats& stats, const EMConfig& cfg,
                    const Theta& warm, int* iterations = nullptr) {
  const double total = stats.Pbar.sum();
  require(total > 0.0, "sufficient statistics carry no mass");
  MStepProblem prob{stats, cfg.sigma2, cfg.lambda_L, cfg.lambda_S};
  MStepSolution sol = solve_mstep(prob, warm.factors(), cfg.solver);
  if (iterations) *iterations = sol.iterations;
  return Theta{std::move(sol.x.L), std::move(sol.x.S), stats.Pbar / total};
}

/**
 * Penalized average log-likelihood
 *   (1/m) sum_l log sum_c P_c N(y_l; (S + L_c) z_l, sigma2 I)
 *   - lambda_S ||S||_1 - lambda_L sum_c ||L_c||_*.
 */
inline double map_objective(const Theta& theta, const Matrix& Y, const Matrix& Z,
                            double sigma2, double lambda_L, double lambda_S) {
  detail::check_data(Y, Z);
  require(sigma2 > 0.0, "sigma2 must be positive");
  const Matrix lj = detail::log_joint(theta, Y, Z, sigma2);
  double ll = 0.0;
  for (Index l = 0; l < lj.rows(); ++l) ll += detail::log_sum_exp(lj.row(l));
  ll /= static_cast<double>(Y.cols());
  ll -= 0.5 * static_cast<double>(Y.rows()) *
        std::log(2.0 * std::numbers::pi * sigma2);
  double reg = lambda_S * theta.S.cwiseAbs().sum();
  for (const Matrix& l : theta.L) reg += lambda_L * nuclear_norm(l);
  return ll - reg;
}

/// Top left singular vector, largest-magnitude entry positive.
inline Vector centrality_from_L(const Matrix& L) {
  require(L.size() > 0, "empty factor");
  if (L.cwiseAbs().maxCoeff() == 0.0)
    throw DegenerateError("low-rank factor is zero; no centrality estimate");
  Eigen::BDCSVD<Matrix> svd(L, Eigen::ComputeThinU);
  Vector u = svd.matrixU().col(0);
  fix_sign(u);
  return u;
}

namespace detail {

struct SpectralStart {
  Responsibilities W;
  std::vector<int> labels;
};

inline SpectralStart spectral_start(const Matrix& Y, Index C,
                                    const KMeansOptions& opts, Rng& rng) {
  const Matrix emb = signal_embedding(Y, C);
  KMeansResult km = kmeans(emb, C, opts, rng);
  return SpectralStart{soft_init(emb, km.centroids), std::move(km.labels)};
}

inline Responsibilities initial_responsibilities(const Matrix& Y, Index C,
                                                 const EMConfig& cfg, Rng& rng) {
  switch (cfg.init) {
    case InitKind::spectral:
      return spectral_start(Y, C, cfg.kmeans, rng).W;
    case InitKind::random:
      return random_init(Y.cols(), C, rng);
    case InitKind::given:
      require(cfg.given.has_value(), "init=given needs responsibilities");
      require(cfg.given->samples() == Y.cols() && cfg.given->components() == C,
              "given responsibilities have the wrong shape");
      return *cfg.given;
  }
  throw ParameterError("unknown init kind");
}

inline std::vector<Vector> centralities(const Theta& theta) {
  std::vector<Vector> out;
  out.reserve(theta.L.size());
  for (const Matrix& l : theta.L) out.push_back(centrality_from_L(l));
  return out;
}

}  // namespace detail

/**
 * Regularized EM. Each round computes sufficient statistics from the current
 * responsibilities, solves the M-step warm started at the previous Theta and
 * refreshes the responsibilities; the MAP objective is recorded after every
 * round.
 */
inline EMResult run_em(const Matrix& Y, const Matrix& Z, Index C,
                       const EMConfig& cfg, Rng& rng,
                       const EMObserver& observer = nullptr) {
  detail::check_data(Y, Z);
  require(C >= 1, "C must be positive");
  require(cfg.T_max >= 1, "T_max must be positive");
  require(cfg.sigma2 > 0.0, "sigma2 must be positive");
  require(Y.cols() >= C, "need at least C samples");

  const Index n = Y.rows();
  const Index k = Z.rows();
  EMResult res;
  res.W = detail::initial_responsibilities(Y, C, cfg, rng);
  Theta theta{std::vector<Matrix>(C, Matrix::Zero(n, k)), Matrix::Zero(n, k),
              Vector::Constant(C, 1.0 / static_cast<double>(C))};

  for (int t = 1; t <= cfg.T_max; ++t) {
    const SuffStats stats = sufficient_stats(res.W, Y, Z);
    int iters = 0;
    theta = m_step(stats, cfg, theta, &iters);
    res.inner_iterations += iters;
    res.W = e_step(theta, Y, Z, cfg.sigma2);
    res.objective_trace.push_back(
        map_objective(theta, Y, Z, cfg.sigma2, cfg.lambda_L, cfg.lambda_S));
    if (observer) observer(t, theta, res.W);
  }
  res.w_hat = res.W.hard_labels();
  res.centralities = detail::centralities(theta);
  res.theta = std::move(theta);
  return res;
}

/**
 * Spectral clustering baseline: hard labels from k-means on the signal
 * embedding, centralities from one M-step on the soft spectral
 * responsibilities.
 */
inline EMResult run_spectral_baseline(const Matrix& Y, const Matrix& Z, Index C,
                                      const EMConfig& cfg, Rng& rng) {
  detail::check_data(Y, Z);
  require(C >= 1 && Y.cols() >= C, "need at least C samples");
  detail::SpectralStart start = detail::spectral_start(Y, C, cfg.kmeans, rng);
  const Index n = Y.rows();
  const Index k = Z.rows();
  Theta warm{std::vector<Matrix>(C, Matrix::Zero(n, k)), Matrix::Zero(n, k),
             Vector::Constant(C, 1.0 / static_cast<double>(C))};
  EMResult res;
  int iters = 0;
  res.theta = m_step(sufficient_stats(start.W, Y, Z), cfg, warm, &iters);
  res.inner_iterations = iters;
  res.W = std::move(start.W);
  res.w_hat = std::move(start.labels);
  res.centralities = detail::centralities(res.theta);
  res.objective_trace.push_back(
      map_objective(res.theta, Y, Z, cfg.sigma2, cfg.lambda_L, cfg.lambda_S));
  return res;
}

}  // namespace mixsig
