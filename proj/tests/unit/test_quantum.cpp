#include <cmath>
#include <random>

#include "common.hpp"
#include "doctest.h"
#include "pnm/errors.hpp"
#include "pnm/lindblad.hpp"
#include "pnm/quantum.hpp"

using namespace pnm;
using pnm::test::max_abs;

TEST_SUITE("quantum") {

TEST_CASE("tensor of identities is the identity") {
  CHECK(max_abs(tensor(identity(2), identity(3)) - identity(6)) == 0.0);
}

TEST_CASE("sigma_z tensor identity is diag(1,1,-1,-1)") {
  const CMatrix m = tensor(pauli_z(), identity(2));
  CMatrix expect = CMatrix::Zero(4, 4);
  expect.diagonal() << 1, 1, -1, -1;
  CHECK(max_abs(m - expect) == 0.0);
}

TEST_CASE("sigma_x tensor a matches the entrywise Kronecker sum") {
  const FockSpace f(2);
  const CMatrix a = f.annihilation();
  const CMatrix k = tensor(pauli_x(), a);
  REQUIRE(k.rows() == 6);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (int n = 0; n < 3; ++n) {
        for (int m = 0; m < 3; ++m) {
          const cplx expect = pauli_x()(x, y) * a(n, m);
          CHECK(std::abs(k(3 * x + n, 3 * y + m) - expect) == 0.0);
        }
      }
    }
  }
  CHECK(std::abs(k(0, 3 + 1) - 1.0) < 1e-15);
  CHECK(std::abs(k(1, 3 + 2) - std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("tensor mixed product and associativity") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix a = test::random_hermitian(2, rng), b = test::random_hermitian(3, rng);
    const CMatrix c = test::random_hermitian(2, rng), d = test::random_hermitian(3, rng);
    const CMatrix e = test::random_hermitian(2, rng);
    CHECK(max_abs(tensor(a, b) * tensor(c, d) - tensor(a * c, b * d)) < 1e-12);
    CHECK(max_abs(tensor(tensor(a, b), e) - tensor(a, tensor(b, e))) < 1e-12);
  }
}

TEST_CASE("tensor rejects dimensions above the limit") {
  CHECK_THROWS_AS(tensor(identity(70), identity(70)), DimensionError);
  CHECK_THROWS_AS(tensor(CMatrix::Zero(2, 3), identity(2)), ContractViolation);
}

TEST_CASE("Fock operators") {
  const FockSpace f(5);
  const CMatrix a = f.annihilation();
  for (int n = 0; n <= 5; ++n) {
    for (int m = 0; m <= 5; ++m) {
      const double expect = (m == n + 1) ? std::sqrt(static_cast<double>(m)) : 0.0;
      CHECK(std::abs(a(n, m) - expect) < 1e-15);
    }
  }
  const CMatrix num = f.number();
  CHECK(max_abs(num - a.adjoint() * a) < 1e-14);
  for (int n = 0; n <= 5; ++n) CHECK(num(n, n).real() == test::rel(n));
}

TEST_CASE("partial trace of product states and symmetric states") {
  std::mt19937_64 rng(3);
  const CMatrix sys = test::random_density(4, rng);
  const FockSpace f(3);
  const DensityMatrix prod(tensor(sys, f.projector(0)));
  CHECK(max_abs(partial_trace_phonon(prod, f).op() - sys) < 1e-14);

  const DensityMatrix mixed(identity(8) / 8.0);
  CHECK(max_abs(partial_trace_phonon(mixed, FockSpace(1)).op() - identity(4) / 4.0) < 1e-15);

  // (|1,0> + |3,1>)/sqrt(2) with Fock n_max = 1.
  CVector psi = CVector::Zero(8);
  psi(0 * 2 + 0) = 1.0 / std::sqrt(2.0);
  psi(2 * 2 + 1) = 1.0 / std::sqrt(2.0);
  const CMatrix red = partial_trace_phonon(DensityMatrix::pure(psi).op(), 4, 2);
  CMatrix expect = CMatrix::Zero(4, 4);
  expect(0, 0) = 0.5;
  expect(2, 2) = 0.5;
  CHECK(max_abs(red - expect) < 1e-15);

  CHECK_THROWS_AS(partial_trace_phonon(mixed, FockSpace(2)), ContractViolation);
}

TEST_CASE("partial trace inverts tensor for any fixed phonon state") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix sys = test::random_density(4, rng);
    const CMatrix ph = test::random_density(3, rng);
    CHECK(max_abs(partial_trace_phonon(tensor(sys, ph), 4, 3) - sys) < 1e-13);
  }
}

TEST_CASE("trace distance examples") {
  CMatrix a = CMatrix::Zero(2, 2), b = CMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  b(1, 1) = 1.0;
  CHECK(trace_distance(a, b) == test::rel(1.0));
  CHECK(trace_distance(a, a) == 0.0);
  CMatrix c = CMatrix::Zero(2, 2), d = identity(2) / 2.0;
  c(0, 0) = 0.75;
  c(1, 1) = 0.25;
  CHECK(trace_distance(c, d) == test::rel(0.25).epsilon(1e-14));
  CMatrix bad = CMatrix::Zero(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(trace_distance(bad, a), ContractViolation);
}

TEST_CASE("trace distance is a bounded symmetric metric") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix r1 = test::random_density(4, rng), r2 = test::random_density(4, rng);
    const double d = trace_distance(r1, r2);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0 + 1e-12);
    CHECK(d == test::rel(trace_distance(r2, r1)).epsilon(1e-13));
  }
}

TEST_CASE("trace distance contracts under a fixed-rate master-equation step") {
  // Four-level amplitude damping chain plus a random Hamiltonian.
  std::mt19937_64 rng(23);
  LindbladModel model;
  model.h = test::random_hermitian(4, rng);
  model.sys_dim = 4;
  model.fock_dim = 1;
  for (int k = 0; k < 3; ++k) {
    CMatrix op = CMatrix::Zero(4, 4);
    op(k, k + 1) = 1.0;
    model.jumps.push_back({op, 0.3 + 0.2 * k, "lower"});
    model.jumps.push_back({op.adjoint(), 0.1, "raise"});
  }
  CMatrix deph = CMatrix::Zero(4, 4);
  deph.diagonal() << 1, -1, 0.5, 0;
  model.jumps.push_back({deph, 0.2, "dephase"});
  const std::vector<double> grid{0.0, 0.7};
  for (int trial = 0; trial < 100; ++trial) {
    const DensityMatrix r1(test::random_density(4, rng)), r2(test::random_density(4, rng));
    const Trajectory t1 = propagate(model, r1, grid), t2 = propagate(model, r2, grid);
    CHECK(trace_distance(t1.states[1], t2.states[1]) <= trace_distance(r1, r2) + 1e-9);
  }
}

TEST_CASE("density matrix validation") {
  CHECK_THROWS_AS(DensityMatrix{identity(2)}, ContractViolation);
  CMatrix nh = identity(2) / 2.0;
  nh(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix{nh}, ContractViolation);
  const DensityMatrix ok = DensityMatrix::basis(3, 1);
  CHECK(ok.check().ok());
  CMatrix neg = CMatrix::Zero(2, 2);
  neg(0, 0) = 1.2;
  neg(1, 1) = -0.2;
  CHECK(DensityMatrix(neg).check().min_eigenvalue == test::rel(-0.2));
  CHECK_FALSE(DensityMatrix(neg).check().ok());
}

}  // TEST_SUITE
