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
#include <span>
#include <vector>

#include "mixsig/core.hpp"
#include "mixsig/graphs.hpp"

namespace mixsig {

/**
 * Graph filter description.
 *
 * A resolvent filter is (I - alpha A)^{-1}. A polynomial filter is
 * sum_t coeffs[t] A^t. Either form may carry a diagonal shift rho, giving the
 * boosted filter H(A) - rho I.
 */
struct FilterSpec {
  enum class Kind { resolvent, polynomial };

  Kind kind = Kind::resolvent;
  double alpha = 0.0;
  std::vector<double> coeffs;
  double shift = 0.0;

  static FilterSpec resolvent(double alpha) {
    return FilterSpec{Kind::resolvent, alpha, {}, 0.0};
  }
  static FilterSpec polynomial(std::vector<double> coeffs) {
    require(!coeffs.empty(), "polynomial filter needs at least one coefficient");
    return FilterSpec{Kind::polynomial, 0.0, std::move(coeffs), 0.0};
  }

  /// H(.) - rho I.
  FilterSpec boosted(double rho) const {
    require(rho >= 0.0, "rho must be nonnegative");
    FilterSpec out = *this;
    out.shift += rho;
    return out;
  }

  /// True when the response is monotone on any interval avoiding its pole.
  bool monotone() const {
    return kind == Kind::resolvent ||
           (kind == Kind::polynomial && coeffs.size() <= 2);
  }
};

inline double frequency_response(const FilterSpec& spec, double lambda) {
  if (spec.kind == FilterSpec::Kind::resolvent) {
    const double denom = 1.0 - spec.alpha * lambda;
    if (denom == 0.0)
      throw DomainError("resolvent response evaluated at its pole");
    return 1.0 / denom - spec.shift;
  }
  double acc = 0.0;
  for (auto it = spec.coeffs.rbegin(); it != spec.coeffs.rend(); ++it)
    acc = acc * lambda + *it;
  return acc - spec.shift;
}

/// A filter realized on one graph.
struct FilterMatrix {
  Matrix matrix;
  FilterSpec spec;
  // Identity of the source graph; non-owning, may be null.
  const Graph* graph = nullptr;
};

inline FilterMatrix apply_filter(const FilterSpec& spec, const Graph& g) {
  const Index n = g.n();
  const Matrix& a = g.adjacency;
  Matrix h;
  if (spec.kind == FilterSpec::Kind::resolvent) {
    if (spec.alpha != 0.0) {
      const Vector ev = spectrum(g).eigenvalues;
      const double worst = spec.alpha > 0 ? spec.alpha * ev(0)
                                          : spec.alpha * ev(n - 1);
      if (!(worst < 1.0))
        throw FilterInstabilityError(
            "resolvent filter requires alpha * lambda < 1 on the spectrum");
    }
    Matrix sys = Matrix::Identity(n, n) - spec.alpha * a;
    Eigen::FullPivLU<Matrix> lu(sys);
    if (!lu.isInvertible())
      throw FilterInstabilityError("I - alpha A is singular");
    h = lu.solve(Matrix::Identity(n, n));
  } else {
    // Horner in matrix form.
    h = Matrix::Zero(n, n);
    for (auto it = spec.coeffs.rbegin(); it != spec.coeffs.rend(); ++it) {
      h = h * a;
      h.diagonal().array() += *it;
    }
  }
  if (spec.shift != 0.0) h.diagonal().array() -= spec.shift;
  return FilterMatrix{std::move(h), spec, &g};
}

inline FilterMatrix boosted_filter(const FilterMatrix& fm, double rho) {
  FilterMatrix out = fm;
  out.spec = fm.spec.boosted(rho);
  out.matrix.diagonal().array() -= rho;
  return out;
}

namespace detail {

struct Extent {
  double max_abs;
  double min_abs;
};

// Extremes of |h| over [lo, hi] for a response that is monotone on the
// interval: the maximum sits at an endpoint, the minimum too unless h changes
// sign inside.
inline Extent monotone_extent(const FilterSpec& spec, double lo, double hi) {
  if (spec.kind == FilterSpec::Kind::resolvent && spec.alpha != 0.0) {
    const double pole = 1.0 / spec.alpha;
    if (pole >= lo && pole <= hi)
      throw DomainError("filter pole lies inside the evaluation interval");
  }
  const double a = frequency_response(spec, lo);
  const double b = frequency_response(spec, hi);
  const bool crosses = (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0);
  return {std::max(std::abs(a), std::abs(b)),
          crosses ? 0.0 : std::min(std::abs(a), std::abs(b))};
}

inline Extent sampled_extent(const FilterSpec& spec, double lo, double hi,
                             std::span<const double> eigenvalues) {
  constexpr int kGrid = 1000;
  Extent e{0.0, std::numeric_limits<double>::infinity()};
  auto visit = [&](double lambda) {
    const double v = std::abs(frequency_response(spec, lambda));
    e.max_abs = std::max(e.max_abs, v);
    e.min_abs = std::min(e.min_abs, v);
  };
  for (double lambda : eigenvalues)
    if (lambda >= lo && lambda <= hi) visit(lambda);
  for (int i = 0; i < kGrid; ++i)
    visit(lo + (hi - lo) * static_cast<double>(i) / (kGrid - 1));
  return e;
}

}  // namespace detail

/**
 * Low pass ratio of a filter over a collection of graphs:
 *
 *   max_{lambda in [min lambda_n, max lambda_2]} |h(lambda)|
 *   / min_{lambda in [min lambda_1, max lambda_1]} |h(lambda)|
 *
 * where the extreme eigenvalues are taken across graphs. Requires
 * min lambda_1 > max lambda_2.
 */
inline double low_pass_ratio(const FilterSpec& spec,
                             std::span<const Graph> graphs) {
  require(!graphs.empty(), "low_pass_ratio needs at least one graph");
  double l1_lo = std::numeric_limits<double>::infinity();
  double l1_hi = -l1_lo;
  double l2_hi = -l1_lo;
  double ln_lo = l1_lo;
  std::vector<double> all;
  for (const Graph& g : graphs) {
    require(g.n() >= 2, "low_pass_ratio needs graphs with at least 2 nodes");
    const Vector ev = spectrum(g).eigenvalues;
    l1_lo = std::min(l1_lo, ev(0));
    l1_hi = std::max(l1_hi, ev(0));
    l2_hi = std::max(l2_hi, ev(1));
    ln_lo = std::min(ln_lo, ev(ev.size() - 1));
    all.insert(all.end(), ev.data(), ev.data() + ev.size());
  }
  if (!(l1_lo > l2_hi))
    throw AssumptionError(
        "smallest top eigenvalue does not exceed the largest second "
        "eigenvalue");

  detail::Extent stop, pass;
  if (spec.monotone()) {
    stop = detail::monotone_extent(spec, ln_lo, l2_hi);
    pass = detail::monotone_extent(spec, l1_lo, l1_hi);
  } else {
    stop = detail::sampled_extent(spec, ln_lo, l2_hi, all);
    pass = detail::sampled_extent(spec, l1_lo, l1_hi, all);
  }
  const double scale = std::max({1.0, stop.max_abs, pass.max_abs});
  if (pass.min_abs <= 1e-12 * scale)
    throw DegenerateError("filter response vanishes in the passband");
  return stop.max_abs / pass.min_abs;
}

}  // namespace mixsig
