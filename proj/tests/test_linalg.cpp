// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "celab/error.hpp"
#include "celab/linalg.hpp"
#include "celab/random.hpp"
#include "oracles.hpp"

using namespace celab;
using oracle::unit;

namespace {

const Tolerances kTol;

ComplexMatrix diag2(Complex a, Complex b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("hs_inner on matrix units and identity") {
  CHECK(hs_inner(unit(2, 0, 0), unit(2, 0, 0)) == Complex(1.0, 0.0));
  CHECK(hs_inner(unit(2, 0, 0), unit(2, 1, 1)) == Complex(0.0, 0.0));
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  CHECK(hs_inner(id, id) == Complex(2.0, 0.0));
  CHECK_THROWS_AS(hs_inner(id, ComplexMatrix::Identity(3, 3)), Error);
}

TEST_CASE("hs_inner is conjugate symmetric and equals trace(a* b)") {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix a = gaussian_matrix(rng, 3, 3);
    const ComplexMatrix b = gaussian_matrix(rng, 3, 3);
    CHECK(std::abs(hs_inner(a, b) - std::conj(hs_inner(b, a))) < 1e-12);
    CHECK(std::abs(hs_inner(a, b) - (a.adjoint() * b).trace()) < 1e-12);
  }
}

TEST_CASE("adjoint is an involution") {
  Rng rng(3);
  const ComplexMatrix a = gaussian_matrix(rng, 4, 4);
  CHECK(ComplexMatrix(a.adjoint().adjoint()) == a);
}

TEST_CASE("operator_norm examples") {
  CHECK(operator_norm(diag2(3.0, -4.0)) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(operator_norm(ComplexMatrix::Zero(3, 3)) == 0.0);
  CHECK(operator_norm(unit(2, 0, 1)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("operator norm satisfies the C*-identity on random matrices") {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const ComplexMatrix a = gaussian_matrix(rng, 1 + t % 6, 1 + t % 6);
    const double na = operator_norm(a);
    const double naa = operator_norm(a.adjoint() * a);
    CHECK(std::abs(naa - na * na) <= 1e-10 * std::max(1.0, na * na));
  }
}

TEST_CASE("psd_check examples") {
  auto r = psd_check(diag2(1.0, 0.0), kTol);
  CHECK(r.is_psd);
  CHECK(r.min_eig == doctest::Approx(0.0));

  r = psd_check(diag2(1.0, -0.5), kTol);
  CHECK_FALSE(r.is_psd);
  CHECK(r.min_eig == doctest::Approx(-0.5));

  ComplexMatrix m(2, 2);
  m << 1, 2, 2, 1;
  r = psd_check(m, kTol);
  CHECK_FALSE(r.is_psd);
  CHECK(r.min_eig == doctest::Approx(oracle::min_real_eigenvalue(m)).epsilon(1e-12));
  CHECK(r.min_eig == doctest::Approx(-1.0));
}

TEST_CASE("psd_check rejects non-Hermitian input") {
  try {
    psd_check(unit(2, 0, 1), kTol);
    FAIL("expected NotHermitian");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotHermitian);
  }
}

TEST_CASE("positivity is invariant under unitary conjugation") {
  Rng rng(17);
  for (int t = 0; t < 30; ++t) {
    const Index n = 2 + t % 5;
    const ComplexMatrix g = gaussian_matrix(rng, n, n);
    const ComplexMatrix a = g.adjoint() * g;
    const ComplexMatrix u = haar_unitary(rng, n);
    CHECK(psd_check(a, kTol).min_eig >= -kTol.eps_psd);
    const ComplexMatrix b = u.adjoint() * a * u;
    CHECK(psd_check((b + b.adjoint()) / 2.0, kTol).is_psd);
  }
}

TEST_CASE("psd_sqrt squares back and clamps tiny negative eigenvalues") {
  Rng rng(23);
  const ComplexMatrix g = gaussian_matrix(rng, 4, 4);
  const ComplexMatrix a = g.adjoint() * g;
  const ComplexMatrix r = psd_sqrt(a, kTol);
  CHECK((r * r - a).norm() < 1e-10);
  CHECK(psd_sqrt(diag2(1.0, -1e-12), kTol)(1, 1) == Complex(0.0, 0.0));
  CHECK_THROWS_AS(psd_sqrt(diag2(1.0, -1e-3), kTol), Error);
}

TEST_CASE("orthonormal_span examples") {
  const ComplexMatrix e11 = unit(2, 0, 0);
  std::vector<ComplexMatrix> dependent = {e11, 2.0 * e11};
  CHECK(orthonormal_span(2, dependent, kTol).dim() == 1);

  std::vector<ComplexMatrix> diag = {e11, unit(2, 1, 1)};
  CHECK(orthonormal_span(2, diag, kTol).dim() == 2);

  std::vector<ComplexMatrix> three = {ComplexMatrix::Identity(2, 2), oracle::pauli_z(), e11};
  CHECK(orthonormal_span(2, three, kTol).dim() == oracle::rank(three));
  CHECK(orthonormal_span(2, three, kTol).dim() == 2);

  CHECK(orthonormal_span(2, std::vector<ComplexMatrix>{}, kTol).is_zero());
}

TEST_CASE("orthonormal_span basis is orthonormal and matches the LU rank") {
  Rng rng(29);
  for (int t = 0; t < 20; ++t) {
    const Index n = 2 + t % 4;
    std::vector<ComplexMatrix> mats;
    const int rank = 1 + t % static_cast<int>(n * n);
    std::vector<ComplexMatrix> seeds;
    for (int k = 0; k < rank; ++k) seeds.push_back(gaussian_matrix(rng, n, n));
    for (int k = 0; k < rank + 3; ++k) {
      ComplexMatrix m = ComplexMatrix::Zero(n, n);
      for (const auto& s : seeds) m += gaussian_matrix(rng, 1, 1)(0, 0) * s;
      mats.push_back(m);
    }
    const auto s = orthonormal_span(n, mats, kTol);
    CHECK(s.dim() == oracle::rank(mats));
    const Eigen::MatrixXcd gram = s.frame().adjoint() * s.frame();
    CHECK((gram - Eigen::MatrixXcd::Identity(s.dim(), s.dim())).norm() < 1e-12);
  }
}

TEST_CASE("re-spanning a subspace basis reproduces it") {
  Rng rng(31);
  std::vector<ComplexMatrix> mats;
  for (int k = 0; k < 5; ++k) mats.push_back(gaussian_matrix(rng, 3, 3));
  const auto s = orthonormal_span(3, mats, kTol);
  const auto t = orthonormal_span(3, s.basis(), kTol);
  CHECK(t.dim() == s.dim());
  CHECK(subspace_equal(s, t, kTol).gap < kTol.eps_residual);
}

TEST_CASE("contains examples") {
  const ComplexMatrix e11 = unit(2, 0, 0);
  const auto s = orthonormal_span(2, std::vector<ComplexMatrix>{e11}, kTol);
  auto m = contains(s, e11, kTol);
  CHECK(m.member);
  CHECK(m.residual == doctest::Approx(0.0));
  m = contains(s, unit(2, 1, 1), kTol);
  CHECK_FALSE(m.member);
  CHECK(m.residual == doctest::Approx(1.0));
  m = contains(OperatorSubspace(2), ComplexMatrix::Zero(2, 2), kTol);
  CHECK(m.member);
  CHECK(m.residual == 0.0);
  CHECK_THROWS_AS(contains(s, ComplexMatrix::Zero(3, 3), kTol), Error);
}

TEST_CASE("membership is closed under linear combinations") {
  Rng rng(37);
  std::vector<ComplexMatrix> mats;
  for (int k = 0; k < 4; ++k) mats.push_back(gaussian_matrix(rng, 3, 3));
  const auto s = orthonormal_span(3, mats, kTol);
  for (int t = 0; t < 30; ++t) {
    const ComplexMatrix x = random_complex_combination(rng, s);
    const ComplexMatrix y = random_complex_combination(rng, s);
    REQUIRE(contains(s, x, kTol).member);
    REQUIRE(contains(s, y, kTol).member);
    const Complex alpha = gaussian_matrix(rng, 1, 1)(0, 0) * 10.0;
    const Complex beta = gaussian_matrix(rng, 1, 1)(0, 0) * 10.0;
    CHECK(contains(s, alpha * x + beta * y, kTol).member);
  }
}

TEST_CASE("contains uses a residual relative to the element norm") {
  const auto s = orthonormal_span(2, std::vector<ComplexMatrix>{unit(2, 0, 0)}, kTol);
  ComplexMatrix x = 1e6 * unit(2, 0, 0);
  x(1, 1) = 1e-3;  // absolute residual 1e-3, relative 1e-9
  CHECK(contains(s, x, kTol).member);
  CHECK_FALSE(contains(s, ComplexMatrix(1e-3 * unit(2, 1, 1)), Tolerances{1e-8, 1e-8, 1e-10, 1e-4}).member);
}

TEST_CASE("subspace_equal examples") {
  const auto a = orthonormal_span(2, std::vector<ComplexMatrix>{unit(2, 0, 0)}, kTol);
  const auto b = orthonormal_span(2, std::vector<ComplexMatrix>{unit(2, 1, 1)}, kTol);
  auto r = subspace_equal(a, a, kTol);
  CHECK(r.equal);
  CHECK(r.gap == doctest::Approx(0.0));
  r = subspace_equal(a, b, kTol);
  CHECK_FALSE(r.equal);
  CHECK(r.gap == doctest::Approx(1.0));

  const auto c = orthonormal_span(
      2, std::vector<ComplexMatrix>{ComplexMatrix::Identity(2, 2), oracle::pauli_z()}, kTol);
  const auto d = orthonormal_span(2, std::vector<ComplexMatrix>{unit(2, 0, 0), unit(2, 1, 1)}, kTol);
  r = subspace_equal(c, d, kTol);
  CHECK(r.equal);
  CHECK(r.gap <= 1e-12);
}

TEST_CASE("subspace_equal behaves as an equivalence relation on random spans") {
  Rng rng(41);
  for (int t = 0; t < 10; ++t) {
    std::vector<ComplexMatrix> mats;
    for (int k = 0; k < 3; ++k) mats.push_back(gaussian_matrix(rng, 3, 3));
    const auto s = orthonormal_span(3, mats, kTol);
    std::vector<ComplexMatrix> mixed1, mixed2;
    for (int k = 0; k < 3; ++k) {
      mixed1.push_back(random_complex_combination(rng, s));
      mixed2.push_back(random_complex_combination(rng, s));
    }
    const auto t1 = orthonormal_span(3, mixed1, kTol);
    const auto t2 = orthonormal_span(3, mixed2, kTol);
    CHECK(subspace_equal(s, s, kTol).equal);
    CHECK(subspace_equal(s, t1, kTol).equal == subspace_equal(t1, s, kTol).equal);
    CHECK(subspace_equal(s, t1, kTol).equal);
    CHECK(subspace_equal(t1, t2, kTol).equal);
    CHECK(subspace_equal(s, t2, kTol).equal);
  }
}

TEST_CASE("ampliate examples") {
  Rng rng(43);
  const ComplexMatrix x = gaussian_matrix(rng, 3, 3);
  CHECK(ampliate({{x}}) == x);

  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  const ComplexMatrix z2 = ComplexMatrix::Zero(2, 2);
  CHECK(ampliate({{i2, z2}, {z2, i2}}) == ComplexMatrix::Identity(4, 4));

  const ComplexMatrix big =
      ampliate({{unit(2, 0, 0), unit(2, 0, 1)}, {unit(2, 1, 0), unit(2, 1, 1)}});
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) expected(2 * i + i, 2 * j + j) = 1.0;
  CHECK(big == expected);
  CHECK(big.cwiseAbs().sum() == doctest::Approx(4.0));
}

TEST_CASE("ampliate rejects ragged input") {
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  CHECK_THROWS_AS(ampliate({{i2, i2}, {i2}}), Error);
  CHECK_THROWS_AS(ampliate({{i2, ComplexMatrix::Identity(3, 3)}, {i2, i2}}), Error);
  CHECK_THROWS_AS(ampliate({}), Error);
}

TEST_CASE("OperatorSubspace rejects non-orthonormal bases") {
  CHECK_THROWS_AS(OperatorSubspace(2, {ComplexMatrix(2.0 * unit(2, 0, 0))}), Error);
  CHECK_NOTHROW(OperatorSubspace(2, std::vector<ComplexMatrix>{}));
}

TEST_CASE("null_space matches the LU kernel dimension") {
  Rng rng(47);
  for (int t = 0; t < 10; ++t) {
    const Index cols = 6;
    const Index r = 1 + t % 5;
    const Eigen::MatrixXcd a = gaussian_matrix(rng, 8, r) * gaussian_matrix(rng, r, cols);
    const Eigen::MatrixXcd k = null_space(a, 1e-10);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(a);
    lu.setThreshold(1e-9);
    CHECK(k.cols() == cols - lu.rank());
    CHECK((a * k).norm() < 1e-10);
  }
}

TEST_CASE("tolerances must be positive") {
  Tolerances t;
  CHECK_NOTHROW(t.validate());
  t.eps_rank = 0.0;
  CHECK_THROWS_AS(t.validate(), Error);
}
