// Copyright 2026 The qubound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QUB_BOUNDS_HPP
#define QUB_BOUNDS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qub/json_io.hpp"
#include "qub/rng.hpp"
#include "qub/seqchain.hpp"

namespace qub {

enum class BoundId {
  T1A,             // trace-distance union bound D <= 2 sqrt(sum eps)
  T1B,             // success-probability union bound >= 1 - 4 sum eps
  Corollary1,      // operator form P1..PN..P1 >= I - 4 sum (I - P_i)
  Sen,             // earlier square-root union bound
  Wilde4th,        // fourth-root bound on the back-and-forth distance
  Lemma1Step,      // per-step sin^2 beta_i <= sin^2 beta_{i-1} + sin^2 alpha_i
  Lemma2Step,      // per-step cos theta_k * a_k >= a_{k-1}
  AppendixBW,      // W >= 0 under sum sin^2 alpha <= 1/2
  HayashiNagaoka,  // (S+T)^{-1/2} S (S+T)^{-1/2} >= I - 2(I-S) - 4T
  PovmRepeat,      // tr(E^m rho) >= 1 - m eps
};

std::string_view to_string(BoundId id);
std::optional<BoundId> bound_from_string(std::string_view name);
std::vector<BoundId> all_bounds();

/// One evaluated inequality. margin = lhs - rhs, oriented so that a
/// non-negative margin means the inequality holds; satisfied allows the
/// shared violation tolerance. A report can instead be skipped when the
/// statement's precondition fails, in which case margin carries no claim.
struct BoundReport {
  BoundId bound = BoundId::T1A;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool satisfied = true;
  bool skipped = false;
  Json meta = Json::object();
};

Json report_to_json(const BoundReport& report);

/// Angle data for the trigonometric lemmas, independent of any quantum
/// instance. betas carries beta_0 explicitly, so sizes are
/// alphas: N, betas: N + 1, thetas: N (thetas may be empty when only the
/// scalar a_k machinery is used).
struct AngleVector {
  std::vector<double> alphas;
  std::vector<double> betas;
  std::vector<double> thetas;

  static AngleVector from_trace(const ChainTrace& trace);
  std::size_t length() const { return alphas.size(); }
  double sin_alpha_square_sum() const;
};

BoundReport check_t1a(const ChainTrace& trace,
                      const Tolerances& tol = default_tolerances());
BoundReport check_t1b(const ChainTrace& trace,
                      const Tolerances& tol = default_tolerances());
BoundReport check_corollary1(const std::vector<Projector>& projectors,
                             const Tolerances& tol = default_tolerances());
BoundReport check_sen(const ChainTrace& trace,
                      const Tolerances& tol = default_tolerances());
/// Requires a back-and-forth trace; the report's meta carries the forward
/// half's distance and its own bound margin for side-by-side comparison.
BoundReport check_wilde4th(const ChainTrace& trace,
                           const Tolerances& tol = default_tolerances());
std::vector<BoundReport> check_lemma1(const ChainTrace& trace,
                                      const Tolerances& tol = default_tolerances());
std::vector<BoundReport> check_lemma2(const ChainTrace& trace,
                                      const Tolerances& tol = default_tolerances());

/// The scalar a_k of the angle recursion; empty sums are zero, so
/// a_{N-1} = cos(beta_{N-1} + alpha_N).
double lemma2_a(std::size_t k, const AngleVector& angles);

/// Grid scan of the one-variable function g(x), x = sin theta_k, whose
/// minimum the recursion step compares against a_{k-1}; also evaluates the
/// closed-form minimizer. Grid points where the radicand is negative are
/// infeasible and skipped.
struct Lemma2Scan {
  std::size_t k = 0;
  std::size_t gridSize = 0;
  double gridMin = 0.0;
  double gridArgmin = 0.0;
  double aPrev = 0.0;
  bool gridAbovePrev = false;       // gridMin >= aPrev - 1e-6
  double closedFormX = 0.0;
  bool closedFormInRange = false;   // x* in [0, 1] and feasible
  double gAtClosedForm = 0.0;
  bool closedFormMatches = false;   // |g(x*) - aPrev| <= 1e-6 when in range
};

Lemma2Scan lemma2_minimizer_scan(std::size_t k, const AngleVector& angles,
                                 std::size_t gridSize = 10000);

BoundReport check_appendixB_W(const std::vector<double>& alphas,
                              const Tolerances& tol = default_tolerances());
BoundReport check_hayashi_nagaoka(const Effect& s, const ComplexMatrix& t,
                                  const Tolerances& tol = default_tolerances());
BoundReport check_povm_repeat(const Effect& e, const DensityOperator& rho,
                              std::size_t m,
                              const Tolerances& tol = default_tolerances());

/// Randomized falsification search for one bound. Each trial draws an
/// instance from a per-trial seeded stream, evaluates the bound, and keeps
/// the worst margin; trials whose instance fails the bound's precondition
/// (or dies in a vanishing branch) are counted as skipped.
struct HuntConfig {
  BoundId bound = BoundId::T1B;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
  Index maxDim = 8;
  std::size_t maxLength = 8;
  std::size_t histogramBins = 32;
  Tolerances tol = default_tolerances();

  static HuntConfig defaults_for(BoundId bound);
};

struct HuntSummary {
  BoundId bound = BoundId::T1B;
  std::size_t trials = 0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::size_t violations = 0;
  bool violationFound = false;
  double minMargin = 0.0;
  std::size_t argminTrial = 0;
  Json argminInstance = Json::object();
  double histogramLow = 0.0;
  double histogramHigh = 0.0;
  std::vector<std::size_t> histogram;
};

HuntSummary hunt_violations(const HuntConfig& config);
Json hunt_summary_to_json(const HuntSummary& summary);

/// Where the two success bounds trade places: the sign change of
/// (1 - 4x) - (1 - 2 sqrt(x)) over x = sum eps, refined by bisection.
/// The exact answer is 1/4.
double sen_t1b_crossover(std::size_t gridSize = 1024);

}  // namespace qub

#endif
