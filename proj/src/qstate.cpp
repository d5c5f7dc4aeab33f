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

#include "qub/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

namespace qub {

namespace {

ComplexVector gaussian_vector(Index d, RngStream& rng) {
  ComplexVector v(d);
  for (Index i = 0; i < d; ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    v[i] = Complex(re, im) / std::numbers::sqrt2;
  }
  return v;
}

ComplexMatrix gaussian_matrix(Index rows, Index cols, RngStream& rng) {
  ComplexMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      m(i, j) = Complex(re, im) / std::numbers::sqrt2;
    }
  return m;
}

/// Thin Q factor of a full-column-rank matrix.
ComplexMatrix thin_q(const ComplexMatrix& m) {
  Eigen::HouseholderQR<ComplexMatrix> qr(m);
  return qr.householderQ() * ComplexMatrix::Identity(m.rows(), m.cols());
}

}  // namespace

PureState::PureState(ComplexVector amplitudes, const Tolerances& tol)
    : amp_(std::move(amplitudes)) {
  if (amp_.size() == 0) {
    throw ShapeError("PureState: empty amplitude vector");
  }
  const double norm = amp_.norm();
  if (std::abs(norm - 1.0) > tol.abs) {
    throw ValidationError("PureState: norm " + std::to_string(norm) +
                          " is not 1 within tolerance");
  }
}

DensityOperator DensityOperator::make(ComplexMatrix m, const Tolerances& tol) {
  DensityOperator rho = subnormalized(std::move(m), tol);
  if (std::abs(rho.trace_ - 1.0) > tol.abs) {
    throw ValidationError("DensityOperator: trace " +
                          std::to_string(rho.trace_) +
                          " is not 1 within tolerance");
  }
  return rho;
}

DensityOperator DensityOperator::subnormalized(ComplexMatrix m,
                                               const Tolerances& tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ShapeError("DensityOperator: matrix must be square and non-empty");
  }
  if (!is_hermitian(m, tol.hermitianGate)) {
    throw ValidationError("DensityOperator: matrix is not Hermitian");
  }
  const double minEig = min_hermitian_eigenvalue(m, tol);
  if (minEig < -tol.abs) {
    throw ValidationError("DensityOperator: eigenvalue " +
                          std::to_string(minEig) + " below zero");
  }
  const double tr = m.trace().real();
  if (tr <= 0.0 || tr > 1.0 + tol.abs) {
    throw ValidationError("DensityOperator: trace " + std::to_string(tr) +
                          " outside (0, 1]");
  }
  return DensityOperator(std::move(m), tr);
}

DensityOperator DensityOperator::from_pure(const PureState& psi) {
  ComplexMatrix m = psi.density();
  const double tr = m.trace().real();
  return DensityOperator(std::move(m), tr);
}

DensityOperator DensityOperator::unchecked(ComplexMatrix m) {
  const double tr = m.trace().real();
  return DensityOperator(std::move(m), tr);
}

Projector::Projector(ComplexMatrix m, const Tolerances& tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw ShapeError("Projector: matrix must be square and non-empty");
  }
  if (!is_hermitian(m_, tol.hermitianGate)) {
    throw ValidationError("Projector: matrix is not Hermitian");
  }
  const double idem = max_abs(m_ * m_ - m_);
  if (idem > tol.abs) {
    throw ValidationError("Projector: ||P^2 - P|| = " + std::to_string(idem) +
                          " exceeds tolerance");
  }
  const double tr = m_.trace().real();
  rank_ = static_cast<Index>(std::llround(tr));
  if (std::abs(tr - static_cast<double>(rank_)) > 1e-6 || rank_ < 0 ||
      rank_ > m_.rows()) {
    throw ValidationError("Projector: trace " + std::to_string(tr) +
                          " is not a valid rank");
  }
}

Projector Projector::identity(Index d) {
  return Projector(ComplexMatrix::Identity(d, d), d);
}

Projector Projector::from_isometry(const ComplexMatrix& v,
                                   const Tolerances& tol) {
  if (v.rows() == 0) {
    throw ShapeError("Projector: isometry must have rows");
  }
  if (v.cols() == 0) {
    return Projector(ComplexMatrix::Zero(v.rows(), v.rows()), 0);
  }
  const ComplexMatrix gram = v.adjoint() * v;
  if (max_abs(gram - ComplexMatrix::Identity(v.cols(), v.cols())) > tol.abs) {
    throw ValidationError("Projector: columns are not orthonormal");
  }
  return Projector(v * v.adjoint(), v.cols());
}

Projector Projector::complement() const {
  return Projector(ComplexMatrix::Identity(dim(), dim()) - m_, dim() - rank_);
}

Effect::Effect(ComplexMatrix m, const Tolerances& tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw ShapeError("Effect: matrix must be square and non-empty");
  }
  if (!is_hermitian(m_, tol.hermitianGate)) {
    throw ValidationError("Effect: matrix is not Hermitian");
  }
  const RealVector ev = hermitian_eig(m_, tol).eigenvalues;
  if (ev.minCoeff() < -tol.abs || ev.maxCoeff() > 1.0 + tol.abs) {
    throw ValidationError("Effect: spectrum escapes [0, 1]");
  }
}

PureState purify(const DensityOperator& rho, const Tolerances& tol) {
  const Index d = rho.dim();
  const EigenDecomposition eig = hermitian_eig(rho.matrix(), tol);
  ComplexVector amp = ComplexVector::Zero(d * d);
  for (Index i = 0; i < d; ++i) {
    const double lambda = std::max(0.0, eig.eigenvalues[i]);
    if (lambda == 0.0) continue;
    const double root = std::sqrt(lambda);
    for (Index a = 0; a < d; ++a) {
      amp[i * d + a] = root * eig.eigenvectors(a, i);
    }
  }
  return PureState(std::move(amp), tol);
}

Projector lift_projector(const Projector& p, Index refDim) {
  if (refDim <= 0) {
    throw ShapeError("lift_projector: reference dimension must be positive");
  }
  ComplexMatrix lifted =
      tensor(ComplexMatrix::Identity(refDim, refDim), p.matrix());
  return Projector(std::move(lifted));
}

double von_neumann_entropy(const DensityOperator& rho, const Tolerances& tol) {
  const RealVector ev = hermitian_eig(rho.matrix(), tol).eigenvalues;
  double s = 0.0;
  for (Index i = 0; i < ev.size(); ++i) {
    const double lambda = ev[i];
    if (lambda < -tol.abs) {
      throw ValidationError("von_neumann_entropy: negative eigenvalue " +
                            std::to_string(lambda));
    }
    if (lambda > 0.0) s -= lambda * std::log2(lambda);
  }
  return std::max(0.0, s);
}

PureState random_pure_state(Index d, RngStream& rng) {
  if (d <= 0) throw ShapeError("random_pure_state: dimension must be positive");
  ComplexVector v = gaussian_vector(d, rng);
  v /= v.norm();
  return PureState(std::move(v));
}

DensityOperator random_density(Index d, Index rank, RngStream& rng) {
  if (d <= 0 || rank <= 0 || rank > d) {
    throw ShapeError("random_density: need 0 < rank <= d");
  }
  const ComplexMatrix g = gaussian_matrix(d, rank, rng);
  ComplexMatrix m = g * g.adjoint();
  m /= m.trace().real();
  m = 0.5 * (m + m.adjoint().eval());
  return DensityOperator::make(std::move(m));
}

Projector random_projector(Index d, Index rank, RngStream& rng) {
  if (d <= 0 || rank < 0 || rank > d) {
    throw ShapeError("random_projector: need 0 <= rank <= d");
  }
  if (rank == 0) return Projector(ComplexMatrix::Zero(d, d));
  if (rank == d) return Projector::identity(d);
  const ComplexMatrix q = thin_q(gaussian_matrix(d, rank, rng));
  return Projector::from_isometry(q);
}

Effect random_effect(Index d, RngStream& rng) {
  if (d <= 0) throw ShapeError("random_effect: dimension must be positive");
  const ComplexMatrix q = thin_q(gaussian_matrix(d, d, rng));
  RealVector spectrum(d);
  for (Index i = 0; i < d; ++i) spectrum[i] = rng.uniform();
  ComplexMatrix m = q * spectrum.asDiagonal() * q.adjoint();
  m = 0.5 * (m + m.adjoint().eval());
  return Effect(std::move(m));
}

ZenoFamily zeno_family(const PureState& psi, std::size_t count, double epsMax,
                       RngStream& rng, Index rank) {
  const Index d = psi.dim();
  if (d < 2) {
    throw ShapeError("zeno_family: need dimension >= 2");
  }
  if (epsMax < 0.0 || epsMax > 1.0) {
    throw ValidationError("zeno_family: epsMax must lie in [0, 1]");
  }
  if (rank < 0) rank = (d + 1) / 2;
  if (rank < 1 || rank >= d) {
    throw ValidationError("zeno_family: rank must lie in [1, d)");
  }
  const double phiMax = std::asin(std::sqrt(epsMax));
  const ComplexVector& base = psi.amplitudes();

  ZenoFamily out;
  out.projectors.reserve(count);
  out.epsilons.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    // Direction orthogonal to psi that spans the rotation plane.
    ComplexVector g = gaussian_vector(d, rng);
    g -= base * base.dot(g);
    double gn = g.norm();
    while (gn < 1e-12) {
      g = gaussian_vector(d, rng);
      g -= base * base.dot(g);
      gn = g.norm();
    }
    g /= gn;
    const double phi = phiMax * rng.uniform();
    ComplexVector rotated = std::cos(phi) * base + std::sin(phi) * g;

    ComplexMatrix iso(d, rank);
    iso.col(0) = rotated;
    if (rank > 1) {
      // Completion orthogonal to the whole rotation plane, so the anchor
      // overlap stays exactly cos^2(phi).
      ComplexMatrix block = gaussian_matrix(d, rank - 1, rng);
      block -= base * (base.adjoint() * block);
      block -= g * (g.adjoint() * block);
      ComplexMatrix q = thin_q(block);
      q -= base * (base.adjoint() * q);
      q -= g * (g.adjoint() * q);
      for (Index j = 0; j < q.cols(); ++j) q.col(j) /= q.col(j).norm();
      iso.rightCols(rank - 1) = q;
    }
    Projector p = Projector::from_isometry(iso);
    const double keep =
        (base.adjoint() * p.matrix() * base)(0, 0).real();
    out.epsilons.push_back(std::clamp(1.0 - keep, 0.0, 1.0));
    out.projectors.push_back(std::move(p));
  }
  return out;
}

std::vector<Projector> equiangular_qubit_chain(std::size_t n) {
  if (n == 0) {
    throw ValidationError("equiangular_qubit_chain: need at least one step");
  }
  std::vector<Projector> chain;
  chain.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double angle =
        std::numbers::pi * static_cast<double>(i) / (2.0 * static_cast<double>(n));
    ComplexVector dir(2);
    dir << std::cos(angle), std::sin(angle);
    ComplexMatrix p = dir * dir.adjoint();
    chain.emplace_back(std::move(p));
  }
  return chain;
}

}  // namespace qub
