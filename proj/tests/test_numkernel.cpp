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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "qub/numkernel.hpp"
#include "qub/rng.hpp"

using namespace qub;

namespace {

ComplexMatrix random_matrix(Index rows, Index cols, RngStream& rng) {
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
  return m;
}

ComplexMatrix random_hermitian(Index d, RngStream& rng) {
  const ComplexMatrix g = random_matrix(d, d, rng);
  return (g + g.adjoint()).eval();
}

}  // namespace

TEST_CASE("max_abs picks the largest entry magnitude") {
  ComplexMatrix m(2, 2);
  m << Complex(1, 0), Complex(0, -3), Complex(0.5, 0.5), Complex(0, 0);
  CHECK(max_abs(m) == doctest::Approx(3.0));
}

TEST_CASE("is_hermitian gates on the max-norm of the antisymmetric part") {
  RngStream rng(11);
  ComplexMatrix h = random_hermitian(4, rng);
  CHECK(is_hermitian(h, 1e-12));
  h(0, 1) += Complex(0, 1e-6);
  CHECK_FALSE(is_hermitian(h, 1e-9));
  CHECK(is_hermitian(h, 1e-3));
}

TEST_CASE("matmul rejects nonconforming shapes") {
  RngStream rng(12);
  const ComplexMatrix a = random_matrix(2, 3, rng);
  const ComplexMatrix b = random_matrix(3, 4, rng);
  CHECK(matmul(a, b).rows() == 2);
  CHECK(matmul(a, b).cols() == 4);
  CHECK_THROWS_AS(matmul(b, a), ShapeError);
}

TEST_CASE("dagger is the conjugate transpose") {
  RngStream rng(13);
  const ComplexMatrix a = random_matrix(3, 2, rng);
  const ComplexMatrix d = dagger(a);
  REQUIRE(d.rows() == 2);
  REQUIRE(d.cols() == 3);
  CHECK(max_abs(d - a.adjoint()) == 0.0);
}

TEST_CASE("hermitian_eig returns an ascending orthonormal decomposition") {
  RngStream rng(14);
  const ComplexMatrix h = random_hermitian(6, rng);
  const EigenDecomposition eig = hermitian_eig(h);

  REQUIRE(eig.eigenvalues.size() == 6);
  for (Index i = 1; i < 6; ++i) CHECK(eig.eigenvalues[i] >= eig.eigenvalues[i - 1]);

  const ComplexMatrix vtv = eig.eigenvectors.adjoint() * eig.eigenvectors;
  CHECK(max_abs(vtv - ComplexMatrix::Identity(6, 6)) < 1e-12);

  const ComplexMatrix rebuilt = eig.eigenvectors *
                                eig.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
                                eig.eigenvectors.adjoint();
  CHECK(max_abs(rebuilt - h) < 1e-12 * max_abs(h));
}

TEST_CASE("hermitian_eig rejects a non-Hermitian input") {
  ComplexMatrix m(2, 2);
  m << Complex(0, 0), Complex(1, 0), Complex(0, 0), Complex(0, 0);
  CHECK_THROWS_AS(hermitian_eig(m), ValidationError);
}

TEST_CASE("tensor follows the Kronecker index convention") {
  ComplexMatrix a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 0, 1, 1, 0;
  const ComplexMatrix t = tensor(a, b);
  REQUIRE(t.rows() == 4);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j)
      CHECK(t(i, j) == a(i / 2, j / 2) * b(i % 2, j % 2));

  const ComplexMatrix id6 = tensor(ComplexMatrix::Identity(2, 2),
                                   ComplexMatrix::Identity(3, 3));
  CHECK(max_abs(id6 - ComplexMatrix::Identity(6, 6)) == 0.0);
}

TEST_CASE("partial_trace inverts tensor on product operators") {
  RngStream rng(15);
  const ComplexMatrix a = random_hermitian(3, rng);
  const ComplexMatrix b = random_hermitian(4, rng);
  const ComplexMatrix ab = tensor(a, b);

  const ComplexMatrix keepA = partial_trace(ab, 3, 4, Subsystem::First);
  const ComplexMatrix keepB = partial_trace(ab, 3, 4, Subsystem::Second);
  CHECK(max_abs(keepA - b.trace() * a) < 1e-12);
  CHECK(max_abs(keepB - a.trace() * b) < 1e-12);

  SUBCASE("trace is preserved on a non-product operator") {
    const ComplexMatrix g = random_hermitian(12, rng);
    const Complex t1 = partial_trace(g, 3, 4, Subsystem::First).trace();
    CHECK(std::abs(t1 - g.trace()) < 1e-12);
  }
  SUBCASE("shape mismatch is rejected") {
    CHECK_THROWS_AS(partial_trace(ab, 5, 4, Subsystem::First), ShapeError);
  }
}

TEST_CASE("trace_norm handles Hermitian and general inputs") {
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d(0, 0) = 2.0;
  d(1, 1) = -1.5;
  d(2, 2) = 0.25;
  CHECK(trace_norm(d) == doctest::Approx(3.75).epsilon(1e-12));

  ComplexMatrix sx(2, 2);
  sx << 0, 1, 1, 0;
  CHECK(trace_norm(sx) == doctest::Approx(2.0).epsilon(1e-12));

  SUBCASE("non-Hermitian inputs go through singular values") {
    ComplexMatrix n = ComplexMatrix::Zero(2, 2);
    n(0, 1) = Complex(0, 3);
    CHECK(trace_norm(n) == doctest::Approx(3.0).epsilon(1e-12));
  }
  SUBCASE("distance between orthogonal rank-one projectors is 2") {
    ComplexMatrix p0 = ComplexMatrix::Zero(2, 2), p1 = ComplexMatrix::Zero(2, 2);
    p0(0, 0) = 1;
    p1(1, 1) = 1;
    CHECK(trace_norm(p0 - p1) == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("min_hermitian_eigenvalue") {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = -3.0;
  d(1, 1) = 5.0;
  CHECK(min_hermitian_eigenvalue(d) == doctest::Approx(-3.0).epsilon(1e-12));
}

TEST_CASE("hermitian_function agrees with direct polynomial evaluation") {
  RngStream rng(16);
  const ComplexMatrix h = random_hermitian(5, rng);
  const ComplexMatrix sq = hermitian_function(h, [](double x) { return x * x; });
  CHECK(max_abs(sq - h * h) < 1e-10 * max_abs(h * h));

  const ComplexMatrix same = hermitian_function(h, [](double x) { return x; });
  CHECK(max_abs(same - h) < 1e-10 * max_abs(h));
}

TEST_CASE("RngStream is deterministic per (seed, stream)") {
  RngStream a(99, 4), b(99, 4), c(99, 5);
  for (int i = 0; i < 16; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  bool diverged = false;
  RngStream a2(99, 4);
  for (int i = 0; i < 16; ++i) diverged |= (a2.uniform() != c.uniform());
  CHECK(diverged);

  RngStream d(7);
  for (int i = 0; i < 64; ++i) CHECK(d.below(10) < 10);
}
