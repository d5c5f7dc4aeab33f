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

#ifndef QUB_NUMKERNEL_HPP
#define QUB_NUMKERNEL_HPP

#include <functional>

#include "qub/common.hpp"

namespace qub {

struct EigenDecomposition {
  /// Eigenvalues in ascending order.
  RealVector eigenvalues;
  /// Orthonormal eigenvectors as columns, aligned with eigenvalues.
  ComplexMatrix eigenvectors;
};

/// Largest absolute entry of a matrix; the max-norm used by all gates.
double max_abs(const ComplexMatrix& a);

/// True when ||a - a^dagger||_max <= gate.
bool is_hermitian(const ComplexMatrix& a, double gate);

/// Shape-checked product a * b.
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

/// Conjugate transpose.
ComplexMatrix dagger(const ComplexMatrix& a);

/// Eigendecomposition for Hermitian input. The input is gated on
/// ||a - a^dagger||_max <= tol.hermitianGate, symmetrized as (a + a^dagger)/2,
/// then decomposed; the result is checked to reconstruct the symmetrized
/// matrix within tol.eigReconstruction * max(1, ||a||_max).
EigenDecomposition hermitian_eig(const ComplexMatrix& a,
                                 const Tolerances& tol = default_tolerances());

/// Kronecker product a (x) b.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

enum class Subsystem { First, Second };

/// Partial trace of an operator on C^dimA (x) C^dimB, keeping the requested
/// factor. Composite indices follow the Kronecker convention used by
/// tensor(): row index i = a * dimB + b.
ComplexMatrix partial_trace(const ComplexMatrix& a, Index dimA, Index dimB,
                            Subsystem keep);

/// Trace norm ||a||_1. Hermitian inputs (within tol.hermitianGate) use the sum
/// of absolute eigenvalues; general inputs use the singular-value route
/// sqrt(eig(a^dagger a)) with negative round-off clipped to zero.
double trace_norm(const ComplexMatrix& a,
                  const Tolerances& tol = default_tolerances());

/// Smallest eigenvalue of a Hermitian matrix.
double min_hermitian_eigenvalue(const ComplexMatrix& a,
                                const Tolerances& tol = default_tolerances());

/// f applied through the eigendecomposition: V f(D) V^dagger.
ComplexMatrix hermitian_function(const ComplexMatrix& a,
                                 const std::function<double(double)>& f,
                                 const Tolerances& tol = default_tolerances());

}  // namespace qub

#endif
