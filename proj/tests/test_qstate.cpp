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

#include "qub/qstate.hpp"

using namespace qub;

namespace {

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace

TEST_CASE("PureState requires a unit vector") {
  ComplexVector v(2);
  v << 1.0, 1.0;
  CHECK_THROWS_AS(PureState{v}, ValidationError);
  v << 1.0, 0.0;
  const PureState psi(v);
  CHECK(psi.dim() == 2);
  CHECK(std::abs(psi.density().trace() - Complex(1.0)) < 1e-12);
}

TEST_CASE("DensityOperator::make validates trace, Hermiticity, positivity") {
  ComplexMatrix ok = ComplexMatrix::Zero(2, 2);
  ok(0, 0) = 0.75;
  ok(1, 1) = 0.25;
  const DensityOperator rho = DensityOperator::make(ok);
  CHECK(rho.trace() == doctest::Approx(1.0));

  SUBCASE("wrong trace") {
    ok(1, 1) = 0.5;
    CHECK_THROWS_AS(DensityOperator::make(ok), ValidationError);
  }
  SUBCASE("non-Hermitian") {
    ok(0, 1) = Complex(0, 1e-3);
    CHECK_THROWS_AS(DensityOperator::make(ok), ValidationError);
  }
  SUBCASE("negative eigenvalue") {
    ComplexMatrix bad = ComplexMatrix::Zero(2, 2);
    bad(0, 0) = 1.2;
    bad(1, 1) = -0.2;
    CHECK_THROWS_AS(DensityOperator::make(bad), ValidationError);
  }
}

TEST_CASE("DensityOperator::subnormalized accepts trace in (0, 1]") {
  ComplexMatrix half = ComplexMatrix::Zero(2, 2);
  half(0, 0) = 0.5;
  CHECK(DensityOperator::subnormalized(half).trace() == doctest::Approx(0.5));

  ComplexMatrix over = ComplexMatrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityOperator::subnormalized(over), ValidationError);
  CHECK_THROWS_AS(DensityOperator::subnormalized(ComplexMatrix::Zero(2, 2)),
                  ValidationError);
}

TEST_CASE("Projector construction and rank") {
  SUBCASE("identity") {
    const Projector p = Projector::identity(3);
    CHECK(p.rank() == 3);
    CHECK(max_abs(p.matrix() - ComplexMatrix::Identity(3, 3)) == 0.0);
  }
  SUBCASE("non-idempotent is rejected") {
    ComplexMatrix m = 0.5 * ComplexMatrix::Identity(2, 2);
    CHECK_THROWS_AS(Projector{m}, ValidationError);
  }
  SUBCASE("from_isometry and complement") {
    RngStream rng(21);
    const Projector p = random_projector(5, 2, rng);
    CHECK(p.rank() == 2);
    CHECK(max_abs(p.matrix() * p.matrix() - p.matrix()) < 1e-12);

    const Projector q = p.complement();
    CHECK(q.rank() == 3);
    CHECK(max_abs(p.matrix() + q.matrix() - ComplexMatrix::Identity(5, 5)) < 1e-12);
  }
  SUBCASE("zero-column isometry gives the zero projector") {
    const Projector z = Projector::from_isometry(ComplexMatrix::Zero(4, 0));
    CHECK(z.rank() == 0);
    CHECK(max_abs(z.matrix()) == 0.0);
  }
}

TEST_CASE("Effect requires spectrum in [0, 1]") {
  ComplexMatrix ok = ComplexMatrix::Zero(2, 2);
  ok(0, 0) = 0.3;
  ok(1, 1) = 1.0;
  CHECK_NOTHROW(Effect{ok});
  ok(1, 1) = 1.2;
  CHECK_THROWS_AS(Effect{ok}, ValidationError);
  ok(1, 1) = -0.1;
  CHECK_THROWS_AS(Effect{ok}, ValidationError);
}

TEST_CASE("purify recovers the state by tracing out the reference") {
  RngStream rng(22);
  const DensityOperator rho = random_density(4, 3, rng);
  const PureState psi = purify(rho);

  const Index refDim = psi.dim() / 4;
  const ComplexMatrix reduced =
      partial_trace(psi.density(), refDim, 4, Subsystem::Second);
  CHECK(max_abs(reduced - rho.matrix()) < 1e-10);
}

TEST_CASE("lift_projector matches an explicit Kronecker product") {
  RngStream rng(23);
  const Projector p = random_projector(3, 1, rng);
  const Projector lifted = lift_projector(p, 2);
  CHECK(lifted.dim() == 6);
  CHECK(lifted.rank() == 2);
  CHECK(max_abs(lifted.matrix() -
                tensor(ComplexMatrix::Identity(2, 2), p.matrix())) < 1e-12);
}

TEST_CASE("von_neumann_entropy on known spectra") {
  ComplexMatrix mixed = 0.25 * ComplexMatrix::Identity(4, 4);
  CHECK(von_neumann_entropy(DensityOperator::make(mixed)) ==
        doctest::Approx(2.0).epsilon(1e-12));

  ComplexMatrix pure = ComplexMatrix::Zero(3, 3);
  pure(1, 1) = 1.0;
  CHECK(von_neumann_entropy(DensityOperator::make(pure)) ==
        doctest::Approx(0.0).epsilon(1e-12));

  ComplexMatrix biased = ComplexMatrix::Zero(2, 2);
  biased(0, 0) = 0.9;
  biased(1, 1) = 0.1;
  CHECK(von_neumann_entropy(DensityOperator::make(biased)) ==
        doctest::Approx(binary_entropy(0.1)).epsilon(1e-12));
}

TEST_CASE("random ensembles satisfy their structural contracts") {
  RngStream rng(24);

  SUBCASE("random_pure_state is unit and reproducible") {
    const PureState a = random_pure_state(6, rng);
    CHECK(a.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-12));
    RngStream r1(24);
    const PureState b = random_pure_state(6, r1);
    CHECK(max_abs(a.density() - b.density()) == 0.0);
  }
  SUBCASE("random_density has the requested rank profile") {
    const DensityOperator rho = random_density(5, 2, rng);
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-12));
    const EigenDecomposition eig = hermitian_eig(rho.matrix());
    CHECK(eig.eigenvalues.minCoeff() > -1e-12);
    CHECK(std::abs(eig.eigenvalues[0]) < 1e-12);
    CHECK(std::abs(eig.eigenvalues[2]) < 1e-12);
    CHECK(eig.eigenvalues[3] > 1e-12);
  }
  SUBCASE("random_projector is idempotent with the requested rank") {
    const Projector p = random_projector(6, 4, rng);
    CHECK(p.rank() == 4);
    CHECK(max_abs(p.matrix() * p.matrix() - p.matrix()) < 1e-12);
    CHECK(is_hermitian(p.matrix(), 1e-12));
  }
  SUBCASE("random_effect spectrum stays in [0, 1]") {
    const Effect e = random_effect(5, rng);
    const EigenDecomposition eig = hermitian_eig(e.matrix());
    CHECK(eig.eigenvalues.minCoeff() >= -1e-12);
    CHECK(eig.eigenvalues.maxCoeff() <= 1.0 + 1e-12);
  }
}

TEST_CASE("zeno_family keeps every epsilon below the cap") {
  RngStream rng(25);
  const PureState psi = random_pure_state(5, rng);
  const ZenoFamily fam = zeno_family(psi, 6, 0.01, rng);
  REQUIRE(fam.projectors.size() == 6);
  REQUIRE(fam.epsilons.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(fam.epsilons[i] >= 0.0);
    CHECK(fam.epsilons[i] <= 0.01 + 1e-12);
    const double keep =
        (fam.projectors[i].matrix() * psi.amplitudes()).squaredNorm();
    CHECK(1.0 - keep == doctest::Approx(fam.epsilons[i]).epsilon(1e-9));
    CHECK(fam.projectors[i].rank() == 3);
  }
  CHECK_THROWS_AS(zeno_family(psi, 2, 0.01, rng, 5), ValidationError);
}

TEST_CASE("equiangular_qubit_chain geometry") {
  const std::size_t n = 4;
  const auto chain = equiangular_qubit_chain(n);
  REQUIRE(chain.size() == n);

  for (std::size_t i = 0; i < n; ++i) {
    CHECK(chain[i].rank() == 1);
    const double angle = (i + 1) * std::acos(-1.0) / (2.0 * n);
    ComplexMatrix expect(2, 2);
    const double c = std::cos(angle), s = std::sin(angle);
    expect << c * c, c * s, c * s, s * s;
    CHECK(max_abs(chain[i].matrix() - expect) < 1e-12);
  }

  // Running the chain walks |0> to |1>.
  ComplexVector zero(2);
  zero << 1.0, 0.0;
  ComplexVector cur = zero;
  for (const Projector& p : chain) {
    cur = p.matrix() * cur;
    cur.normalize();
  }
  CHECK(std::abs(cur(1)) == doctest::Approx(1.0).epsilon(1e-12));
}
