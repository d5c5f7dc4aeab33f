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

#ifndef QUB_SEQCHAIN_HPP
#define QUB_SEQCHAIN_HPP

#include <optional>
#include <variant>
#include <vector>

#include "qub/qstate.hpp"

namespace qub {

/// An ordered list of projective yes-measurements applied to one initial
/// state. The initial state may be pure, mixed, or (for comparisons against
/// bounds stated for subnormalized inputs) a positive operator with trace
/// at most one.
struct MeasurementChain {
  MeasurementChain(std::vector<Projector> ps, PureState psi,
                   const ResourceLimits& limits = default_limits());
  MeasurementChain(std::vector<Projector> ps, DensityOperator rho,
                   const ResourceLimits& limits = default_limits());

  std::vector<Projector> projectors;
  std::variant<PureState, DensityOperator> initial;

  Index dim() const;
  bool pure() const { return std::holds_alternative<PureState>(initial); }
  std::size_t length() const { return projectors.size(); }

  /// Initial state as a density operator regardless of representation.
  DensityOperator initial_density() const;
};

/// Everything observed while executing a chain.
///
/// Per-step arrays are aligned with executed steps (entry j belongs to step
/// j+1). Angle arrays are populated only for pure initial states; the
/// convention matches the trigonometric picture of the run: theta[j] is the
/// angle between consecutive conditioned states, alpha[j] satisfies
/// sin^2(alpha) = 1 - <psi|P|psi> for that step's projector against the
/// original state, beta[j] is the angle between the original state and the
/// state after step j+1 (beta_0 = 0 is implicit), and gamma[j] closes the
/// identity cos(beta) = cos(alpha) * cos(gamma) whose residual is recorded.
struct ChainTrace {
  Index dim = 0;
  bool pure = false;
  bool backAndForth = false;
  std::size_t uniqueProjectors = 0;
  double initialTrace = 1.0;

  /// Conditional probability of the yes outcome at each executed step.
  std::vector<double> stepProbabilities;
  /// 1 - tr(P_i rho) against the original state, one entry per distinct
  /// projector of the chain (not per executed step).
  std::vector<double> epsilons;

  std::vector<double> thetas;
  std::vector<double> alphas;
  std::vector<double> betas;
  std::vector<double> gammas;
  std::vector<double> betaResiduals;

  /// Unconditional probability of the all-yes record: product of the step
  /// conditionals times the initial trace.
  double successProbability = 1.0;
  /// The same quantity evaluated in one shot as tr(A rho A^dagger) where A is
  /// the full projector string; kept separate as a consistency witness.
  double directSuccessProbability = 1.0;
  /// ||rho - initialTrace * rho_final||_1 with rho_final the renormalized
  /// conditioned state (plain trace distance when the input is normalized).
  double traceDistance = 0.0;
  /// For back-and-forth runs only: the same distance evaluated at the
  /// turning point, i.e. after the forward half of the schedule.
  std::optional<double> forwardTraceDistance;

  std::optional<DensityOperator> finalState;
  std::vector<DensityOperator> intermediateStates;

  double epsilon_sum() const;
  /// Sum of epsilons over executed steps: equals epsilon_sum() for a
  /// straight run and 2*sum - eps_N for a back-and-forth run, where every
  /// projector except the last acts twice.
  double executed_epsilon_sum() const;
};

struct RunOptions {
  bool keepIntermediates = false;
  Tolerances tol = default_tolerances();
};

/// Raised when a conditional branch probability falls to or below
/// tol.probFloor: the record being conditioned on is genuinely vanishing and
/// renormalizing would divide by (numerical) zero. Carries the 1-based step
/// at which the branch died and the partial trace collected so far.
class VanishingBranchError : public Error {
 public:
  VanishingBranchError(std::size_t step, double probability, ChainTrace partial);

  std::size_t step() const { return step_; }
  double probability() const { return probability_; }
  const ChainTrace& partial_trace() const { return partial_; }

 private:
  std::size_t step_;
  double probability_;
  ChainTrace partial_;
};

/// One conditioning step: returns the renormalized post-measurement state
/// P rho P / tr(P rho) and the conditional probability tr(P rho) / tr(rho).
std::pair<DensityOperator, double> apply_projector(
    const Projector& p, const DensityOperator& rho,
    const Tolerances& tol = default_tolerances());

/// Executes the chain front to back. Pure initial states evolve as vectors
/// and the trace additionally carries the angle arrays.
ChainTrace run_chain(const MeasurementChain& chain, const RunOptions& opts = {});

/// Angle extraction for pure chains; rejects mixed inputs with a message
/// pointing at the purification route. Equivalent to run_chain on a pure
/// chain but fails fast instead of silently skipping the angles.
ChainTrace extract_angles(const MeasurementChain& chain,
                          const RunOptions& opts = {});

/// Executes P_1 .. P_N then P_{N-1} .. P_1 (2N - 1 steps). The trace keeps
/// one epsilon per distinct projector and flags itself as back-and-forth.
ChainTrace run_back_and_forth(const MeasurementChain& chain,
                              const RunOptions& opts = {});

/// tr(A rho A^dagger) for the full projector string, evaluated directly with
/// no renormalization, so it is well defined even when some branch vanishes.
double chain_success_probability(const MeasurementChain& chain);

/// Reference-lifted equivalent of a mixed chain: the initial state becomes a
/// purification and every projector becomes I (x) P. Pure chains pass
/// through unchanged.
MeasurementChain purified_chain(const MeasurementChain& chain,
                                const ResourceLimits& limits = default_limits());

}  // namespace qub

#endif
