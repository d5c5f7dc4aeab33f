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

#include "qub/numkernel.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace qub {

double max_abs(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& a, double gate) {
  if (a.rows() != a.cols()) return false;
  return max_abs(a - a.adjoint()) <= gate;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions " + std::to_string(a.cols()) +
                     " and " + std::to_string(b.rows()) + " do not conform");
  }
  return a * b;
}

ComplexMatrix dagger(const ComplexMatrix& a) { return a.adjoint(); }

EigenDecomposition hermitian_eig(const ComplexMatrix& a,
                                 const Tolerances& tol) {
  if (a.rows() != a.cols()) {
    throw ShapeError("hermitian_eig: matrix is " + std::to_string(a.rows()) +
                     "x" + std::to_string(a.cols()) + ", not square");
  }
  const double dev = max_abs(a - a.adjoint());
  if (dev > tol.hermitianGate) {
    throw ValidationError(
        "hermitian_eig: input deviates from Hermitian by " +
        std::to_string(dev));
  }
  const ComplexMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error("hermitian_eig: eigensolver did not converge");
  }
  EigenDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  const ComplexMatrix rebuilt = out.eigenvectors *
                                out.eigenvalues.asDiagonal() *
                                out.eigenvectors.adjoint();
  const double scale = std::max(1.0, max_abs(sym));
  if (max_abs(rebuilt - sym) > tol.eigReconstruction * scale) {
    throw Error("hermitian_eig: reconstruction residual exceeds tolerance");
  }
  return out;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

ComplexMatrix partial_trace(const ComplexMatrix& a, Index dimA, Index dimB,
                            Subsystem keep) {
  if (dimA <= 0 || dimB <= 0 || a.rows() != a.cols() ||
      a.rows() != dimA * dimB) {
    throw ShapeError("partial_trace: matrix of size " +
                     std::to_string(a.rows()) + " does not factor as " +
                     std::to_string(dimA) + "*" + std::to_string(dimB));
  }
  if (keep == Subsystem::First) {
    ComplexMatrix out = ComplexMatrix::Zero(dimA, dimA);
    for (Index i = 0; i < dimA; ++i)
      for (Index j = 0; j < dimA; ++j)
        for (Index b = 0; b < dimB; ++b)
          out(i, j) += a(i * dimB + b, j * dimB + b);
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(dimB, dimB);
  for (Index i = 0; i < dimB; ++i)
    for (Index j = 0; j < dimB; ++j)
      for (Index x = 0; x < dimA; ++x)
        out(i, j) += a(x * dimB + i, x * dimB + j);
  return out;
}

double trace_norm(const ComplexMatrix& a, const Tolerances& tol) {
  if (a.rows() != a.cols()) {
    throw ShapeError("trace_norm: input must be square");
  }
  if (is_hermitian(a, tol.hermitianGate)) {
    return hermitian_eig(a, tol).eigenvalues.cwiseAbs().sum();
  }
  const ComplexMatrix gram = a.adjoint() * a;
  RealVector ev = hermitian_eig(gram, tol).eigenvalues;
  double sum = 0.0;
  for (Index i = 0; i < ev.size(); ++i) {
    sum += std::sqrt(std::max(0.0, ev[i]));
  }
  return sum;
}

double min_hermitian_eigenvalue(const ComplexMatrix& a, const Tolerances& tol) {
  return hermitian_eig(a, tol).eigenvalues.minCoeff();
}

ComplexMatrix hermitian_function(const ComplexMatrix& a,
                                 const std::function<double(double)>& f,
                                 const Tolerances& tol) {
  EigenDecomposition eig = hermitian_eig(a, tol);
  RealVector mapped(eig.eigenvalues.size());
  for (Index i = 0; i < mapped.size(); ++i) mapped[i] = f(eig.eigenvalues[i]);
  return eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.adjoint();
}

}  // namespace qub
