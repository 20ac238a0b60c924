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

#include <cstdint>
#include <functional>
#include <iostream>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace mixsig {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Error hierarchy. Every error thrown by the library derives from Error so
// callers (the experiment runner in particular) can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid sizes, probabilities or shapes passed by the caller.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Evaluation at a pole of a filter response.
class DomainError : public Error {
 public:
  using Error::Error;
};

// I - alpha*A is singular or alpha*lambda_1 >= 1.
class FilterInstabilityError : public Error {
 public:
  using Error::Error;
};

// The graphs do not satisfy the spectral gap premise of the low pass ratio.
class AssumptionError : public Error {
 public:
  using Error::Error;
};

// A filter response vanishes in the passband, or a factor is all zero.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// The solver produced a non-finite objective.
class NumericalError : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ParameterError(what);
}

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for a sub-stream identified by (a, b); stable across runs and
/// independent of how many other sub-streams exist.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                    std::uint64_t b = 0) {
  return base ^ mix64(mix64(a) ^ (b + 0x632be59bd9b4e019ULL));
}

/// Uniform double in [lo, hi) built from the top 53 bits of one draw.
inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

/// Uniform integer in [0, n).
inline Index uniform_index(Rng& rng, Index n) {
  std::uniform_int_distribution<Index> dist(0, n - 1);
  return dist(rng);
}

using WarningSink = std::function<void(std::string_view)>;

inline WarningSink& warning_sink() {
  static WarningSink sink = [](std::string_view msg) {
    std::cerr << "mixsig warning: " << msg << '\n';
  };
  return sink;
}

/// Delivers msg to the sink; calls are serialized across threads.
inline void warn(std::string_view msg) {
  static std::mutex mu;
  const std::lock_guard<std::mutex> lock(mu);
  if (warning_sink()) warning_sink()(msg);
}

/// Flip v so that its largest-magnitude entry is positive (first index on
/// ties).
inline void fix_sign(Eigen::Ref<Vector> v) {
  if (v.size() == 0) return;
  Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0) v = -v;
}

}  // namespace mixsig
