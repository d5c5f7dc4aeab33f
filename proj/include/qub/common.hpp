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

#ifndef QUB_COMMON_HPP
#define QUB_COMMON_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qub {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Central numeric tolerances. Every comparison in the library routes through
/// one of these knobs so that a single object describes the numeric contract.
struct Tolerances {
  /// Generic absolute tolerance for validation (norms, traces, idempotence).
  double abs = 1e-9;
  /// Allowed max-abs deviation ||A - A^dagger|| before an input is rejected
  /// as non-Hermitian.
  double hermitianGate = 1e-9;
  /// Allowed reconstruction residual ||V D V^dagger - A|| after a Hermitian
  /// eigendecomposition, relative to ||A||.
  double eigReconstruction = 1e-10;
  /// Branch probabilities at or below this are treated as genuinely vanishing
  /// (conditioning on them is refused rather than renormalized).
  double probFloor = 1e-12;
  /// A bound margin below -violation is flagged as a violation.
  double violation = 1e-9;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

/// Caps that keep dense linear algebra within the memory budget. Exceeding a
/// cap is a clean ResourceError, never silent truncation.
struct ResourceLimits {
  /// Largest total Hilbert-space dimension of any state or operator.
  std::size_t maxDim = 4096;
  /// Largest dimension at which a dense D x D operator may be materialized
  /// (commuting-channel work stays on diagonals and is only bounded by
  /// maxDim).
  std::size_t maxDenseDim = 2048;
  /// Largest number of codebook entries (2^ceil(nR)).
  std::size_t maxCodebookEntries = std::size_t{1} << 16;
  /// Largest total symbol count of a codebook (entries x block length).
  std::size_t maxCodebookCells = std::size_t{1} << 20;
};

inline const ResourceLimits& default_limits() {
  static const ResourceLimits l{};
  return l;
}

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Operand dimensions do not conform.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(what) {}
};

/// An input fails a mathematical precondition (not normalized, not Hermitian,
/// not a projector, malformed serialized payload, ...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

/// A request exceeds the configured dimension/size caps.
class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(what) {}
};

}  // namespace qub

#endif
