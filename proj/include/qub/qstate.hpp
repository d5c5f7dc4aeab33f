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

#ifndef QUB_QSTATE_HPP
#define QUB_QSTATE_HPP

#include <vector>

#include "qub/common.hpp"
#include "qub/numkernel.hpp"
#include "qub/rng.hpp"

namespace qub {

/// Unit vector in C^d.
class PureState {
 public:
  explicit PureState(ComplexVector amplitudes,
                     const Tolerances& tol = default_tolerances());

  const ComplexVector& amplitudes() const { return amp_; }
  Index dim() const { return amp_.size(); }

  /// Rank-one density matrix |psi><psi|.
  ComplexMatrix density() const { return amp_ * amp_.adjoint(); }

 private:
  ComplexVector amp_;
};

/// Hermitian, positive semidefinite operator with unit (or, for the
/// subnormalized variant, at most unit) trace.
class DensityOperator {
 public:
  /// Validating constructor for normalized states: Hermitian within
  /// tol.hermitianGate, eigenvalues >= -tol.abs, trace within tol.abs of 1.
  static DensityOperator make(ComplexMatrix m,
                              const Tolerances& tol = default_tolerances());

  /// Same validation but the trace may lie anywhere in (0, 1 + tol.abs].
  static DensityOperator subnormalized(
      ComplexMatrix m, const Tolerances& tol = default_tolerances());

  static DensityOperator from_pure(const PureState& psi);

  /// Skips the eigenvalue scan. Reserved for operators that are positive by
  /// construction (conjugations P X P of an already validated operator).
  static DensityOperator unchecked(ComplexMatrix m);

  const ComplexMatrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }
  double trace() const { return trace_; }

 private:
  DensityOperator(ComplexMatrix m, double tr)
      : m_(std::move(m)), trace_(tr) {}

  ComplexMatrix m_;
  double trace_;
};

/// Hermitian idempotent. Rank is recovered from the trace.
class Projector {
 public:
  explicit Projector(ComplexMatrix m,
                     const Tolerances& tol = default_tolerances());

  static Projector identity(Index d);

  /// P = V V^dagger for an isometry V (orthonormal columns). A zero-column V
  /// yields the zero projector.
  static Projector from_isometry(const ComplexMatrix& v,
                                 const Tolerances& tol = default_tolerances());

  const ComplexMatrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }
  Index rank() const { return rank_; }

  Projector complement() const;

 private:
  Projector(ComplexMatrix m, Index rank) : m_(std::move(m)), rank_(rank) {}

  ComplexMatrix m_;
  Index rank_;
};

/// Operator with spectrum in [0, 1].
class Effect {
 public:
  explicit Effect(ComplexMatrix m, const Tolerances& tol = default_tolerances());

  const ComplexMatrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }

 private:
  ComplexMatrix m_;
};

/// Purification of rho on reference (x) system, reference factor first:
/// |Psi> = sum_i sqrt(lambda_i) |i>_R |v_i>_A, so tracing out the reference
/// recovers rho.
PureState purify(const DensityOperator& rho,
                 const Tolerances& tol = default_tolerances());

/// I_ref (x) P, matching the factor order used by purify().
Projector lift_projector(const Projector& p, Index refDim);

/// Von Neumann entropy in bits. Eigenvalues within tol.abs below zero are
/// clipped to zero before the sum.
double von_neumann_entropy(const DensityOperator& rho,
                           const Tolerances& tol = default_tolerances());

PureState random_pure_state(Index d, RngStream& rng);

/// rank-limited state G G^dagger / tr(G G^dagger) with G a d x rank matrix of
/// standard complex Gaussians. rank == d gives the Hilbert-Schmidt ensemble.
DensityOperator random_density(Index d, Index rank, RngStream& rng);

/// Projector onto a Haar-random rank-dimensional subspace (QR of a complex
/// Gaussian matrix; the subspace span is what matters, so column phases drop
/// out of V V^dagger).
Projector random_projector(Index d, Index rank, RngStream& rng);

/// Operator with Haar-random eigenbasis and i.i.d. uniform [0, 1] spectrum.
Effect random_effect(Index d, RngStream& rng);

struct ZenoFamily {
  std::vector<Projector> projectors;
  /// eps_i = 1 - <psi|P_i|psi> for the anchor state; each is <= epsMax.
  std::vector<double> epsilons;
};

/// Family of `count` projectors that each almost pass the anchor state: the
/// range of P_i contains psi rotated by a uniform angle in
/// [0, asin(sqrt(epsMax))] inside a random 2-plane through psi, completed to
/// the requested rank by directions orthogonal to both psi and its rotation.
/// rank defaults to ceil(d / 2) and must stay below d.
ZenoFamily zeno_family(const PureState& psi, std::size_t count, double epsMax,
                       RngStream& rng, Index rank = -1);

/// Rank-one projectors onto the qubit directions at angles i * pi / (2n),
/// i = 1..n, from the |0> axis. Running them in order on |0> walks the state
/// to |1> through n equal steps.
std::vector<Projector> equiangular_qubit_chain(std::size_t n);

}  // namespace qub

#endif
