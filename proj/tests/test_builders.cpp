// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "celab/builders.hpp"
#include "celab/construct.hpp"
#include "celab/error.hpp"
#include "oracles.hpp"

using namespace celab;
using oracle::unit;

namespace {

const Tolerances kTol;

void check_certified(const CPMap& m) {
  const auto c = certify_projection(m, kTol);
  CHECK(c.cp);
  CHECK(c.contractive);
  CHECK(c.idempotent);
  CHECK(c.idem_residual < 1e-8);
  CHECK(c.choi_min_eig > -1e-8);
}

// All set partitions of {0..n-1} by restricted growth strings.
std::vector<std::vector<std::vector<Index>>> all_partitions(Index n) {
  std::vector<std::vector<std::vector<Index>>> out;
  std::vector<Index> a(static_cast<std::size_t>(n), 0);
  std::function<void(Index, Index)> rec = [&](Index i, Index max_label) {
    if (i == n) {
      std::vector<std::vector<Index>> blocks(static_cast<std::size_t>(max_label + 1));
      for (Index k = 0; k < n; ++k) blocks[static_cast<std::size_t>(a[static_cast<std::size_t>(k)])].push_back(k);
      out.push_back(blocks);
      return;
    }
    for (Index label = 0; label <= max_label + 1; ++label) {
      a[static_cast<std::size_t>(i)] = label;
      rec(i + 1, std::max(max_label, label));
    }
  };
  a[0] = 0;
  rec(1, 0);
  return out;
}

ComplexMatrix range_dim_oracle_images(const CPMap& m) {
  const Index n = m.ambient_dim();
  ComplexMatrix s(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) s.col(i * n + j) = vec(m(unit(n, i, j)));
  return s;
}

Index image_rank(const CPMap& m) {
  Eigen::FullPivLU<ComplexMatrix> lu(range_dim_oracle_images(m));
  lu.setThreshold(1e-9);
  return lu.rank();
}

}  // namespace

TEST_CASE("Partition validation") {
  CHECK_NOTHROW(Partition(3, {{0, 1}, {2}}));
  CHECK_THROWS_AS(Partition(3, {{0, 1}}), Error);           // does not cover
  CHECK_THROWS_AS(Partition(3, {{0, 1}, {1, 2}}), Error);   // overlap
  CHECK_THROWS_AS(Partition(3, {{0, 1, 2}, {}}), Error);    // empty block
  CHECK_THROWS_AS(Partition(2, {{0}, {2}}), Error);         // out of range
  CHECK(Partition::from_one_based(3, {{1, 2}, {3}}).blocks()[1][0] == 2);
  CHECK_THROWS_AS(Partition::from_one_based(2, {{0}, {1}}), Error);
  try {
    Partition(2, {{0}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidPartition);
  }
}

TEST_CASE("pinching examples") {
  const auto p = pinching(Partition(2, {{0}, {1}}), kTol);
  ComplexMatrix expect = ComplexMatrix::Zero(2, 2);
  expect(0, 0) = 1.0;
  expect(1, 1) = 4.0;
  CHECK((p(oracle::example_2x2()) - expect).norm() == 0.0);

  const auto whole = pinching(Partition(2, {{0, 1}}), kTol);
  CHECK(whole(oracle::example_2x2()) == oracle::example_2x2());

  const auto diag3 = pinching(Partition(3, {{0}, {1}, {2}}), kTol);
  CHECK(range_of(diag3, kTol).dim() == 3);
  const auto c = *diag3.certificate();
  CHECK(c.unital);
}

TEST_CASE("pinching range dimension is the sum of squared block sizes") {
  for (Index n = 1; n <= 4; ++n) {
    const auto parts = all_partitions(n);
    for (const auto& blocks : parts) {
      const Partition p(n, blocks);
      const auto m = pinching(p, kTol);
      check_certified(m);
      Index expected = 0;
      for (const auto& b : blocks) expected += static_cast<Index>(b.size() * b.size());
      CHECK(p.range_dimension() == expected);
      CHECK(image_rank(m) == expected);
      CHECK(range_of(m, kTol).dim() == expected);
    }
    const std::size_t bell[] = {0, 1, 2, 5, 15};
    CHECK(parts.size() == bell[n]);
  }
}

TEST_CASE("group_average examples") {
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  const auto id = group_average(std::vector<ComplexMatrix>{i2}, kTol);
  CHECK(id(oracle::example_2x2()) == oracle::example_2x2());

  const auto pin = group_average(std::vector<ComplexMatrix>{i2, oracle::pauli_z()}, kTol);
  const auto ref = pinching(Partition(2, {{0}, {1}}), kTol);
  CHECK((pin.choi() - ref.choi()).norm() < 1e-14);

  const auto flip = group_average(std::vector<ComplexMatrix>{i2, oracle::pauli_x()}, kTol);
  const auto r = range_of(flip, kTol);
  CHECK(r.dim() == 2);
  const auto expected = orthonormal_span(2, std::vector<ComplexMatrix>{i2, oracle::pauli_x()}, kTol);
  CHECK(subspace_equal(r, expected, kTol).equal);
  CHECK(range_product_closure_residual(r, kTol) < 1e-12);
  CHECK((oracle::pauli_x() * i2 - i2 * oracle::pauli_x()).norm() == 0.0);
}

TEST_CASE("group_average rejects non-groups and non-unitaries") {
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  ComplexMatrix s = ComplexMatrix::Identity(2, 2);
  s(1, 1) = Complex(0.0, 1.0);  // order 4, so {I, s} is not closed
  try {
    group_average(std::vector<ComplexMatrix>{i2, s}, kTol);
    FAIL("expected NotAGroup");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAGroup);
  }
  try {
    group_average(std::vector<ComplexMatrix>{ComplexMatrix(2.0 * i2)}, kTol);
    FAIL("expected NotUnitary");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotUnitary);
  }
  std::vector<ComplexMatrix> big(49, i2);
  CHECK_THROWS_AS(group_average(big, kTol), Error);
}

TEST_CASE("group average is invariant under the group action") {
  Rng rng(211);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    // Cyclic group generated by a random diagonal phase pattern of order 3.
    const ComplexMatrix w = haar_unitary(rng, 3);
    ComplexMatrix g = ComplexMatrix::Identity(3, 3);
    const double th = 2.0 * std::numbers::pi / 3.0;
    g(1, 1) = std::polar(1.0, th);
    g(2, 2) = std::polar(1.0, 2.0 * th * static_cast<double>(seed % 2));
    g = w * g * w.adjoint();
    std::vector<ComplexMatrix> grp = {ComplexMatrix::Identity(3, 3), g, g * g};
    const auto m = group_average(grp, kTol);
    check_certified(m);
    for (int t = 0; t < 5; ++t) {
      const ComplexMatrix x = gaussian_matrix(rng, 3, 3);
      for (const auto& u : grp) CHECK((m(u * x * u.adjoint()) - m(x)).norm() < kTol.eps_residual);
    }
  }
}

TEST_CASE("conjugated_pinching examples") {
  const Partition p(2, {{0}, {1}});
  const auto plain = pinching(p, kTol);
  CHECK((conjugated_pinching(ComplexMatrix::Identity(2, 2), p, kTol).choi() - plain.choi()).norm() <
        1e-14);
  CHECK((conjugated_pinching(oracle::pauli_x(), p, kTol).choi() - plain.choi()).norm() < 1e-14);

  Rng rng(223);
  const ComplexMatrix u = haar_unitary(rng, 2);
  const auto m = conjugated_pinching(u, p, kTol);
  const auto r = range_of(m, kTol);
  CHECK(r.dim() == 2);
  const auto expected = orthonormal_span(
      2, std::vector<ComplexMatrix>{u * unit(2, 0, 0) * u.adjoint(), u * unit(2, 1, 1) * u.adjoint()},
      kTol);
  CHECK(subspace_equal(r, expected, kTol).equal);

  ComplexMatrix not_unitary = ComplexMatrix::Identity(2, 2);
  not_unitary(0, 1) = 1.0;
  try {
    conjugated_pinching(not_unitary, p, kTol);
    FAIL("expected NotUnitary");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotUnitary);
  }
}

TEST_CASE("conjugated pinching range is the conjugated block algebra") {
  Rng rng(227);
  for (Index n = 2; n <= 5; ++n) {
    const Partition p(n, random_set_partition(rng, n));
    const ComplexMatrix u = haar_unitary(rng, n);
    const auto m = conjugated_pinching(u, p, kTol);
    check_certified(m);
    const auto blocks = range_of(pinching(p, kTol), kTol);
    std::vector<ComplexMatrix> conj;
    for (const auto& b : blocks.basis()) conj.push_back(u * b * u.adjoint());
    CHECK(subspace_equal(range_of(m, kTol), orthonormal_span(n, conj, kTol), kTol).gap <
          kTol.eps_residual);
  }
}

TEST_CASE("ChannelSpec certifies trace preservation") {
  Rng rng(229);
  CHECK(random_channel(rng, 3, 2, kTol).trace_preserving);
  CHECK_FALSE(ChannelSpec::make({ComplexMatrix(0.5 * ComplexMatrix::Identity(2, 2))}, kTol).trace_preserving);
  CHECK_THROWS_AS(ChannelSpec::make({}, kTol), Error);
}

TEST_CASE("Cesaro projection of an idempotent channel is immediate") {
  const auto p = pinching(Partition(3, {{0, 1}, {2}}), kTol);
  std::vector<ComplexMatrix> kraus = {unit(3, 0, 0) + unit(3, 1, 1), unit(3, 2, 2)};
  const auto r = cesaro_projection(ChannelSpec::make(kraus, kTol), kTol);
  CHECK(r.iterations == 1);
  CHECK((r.map.choi() - p.choi()).norm() < 1e-12);
}

TEST_CASE("Cesaro projection of a phase rotation is the diagonal pinching") {
  ComplexMatrix u = ComplexMatrix::Identity(2, 2);
  u(1, 1) = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  const auto r = cesaro_projection(ChannelSpec::make({u}, kTol), kTol);
  const auto ref = pinching(Partition(2, {{0}, {1}}), kTol);
  CHECK((r.map.choi() - ref.choi()).norm() < 1e-8);
  check_certified(r.map);
}

TEST_CASE("Cesaro limit of random channels has the fixed-space dimension") {
  Rng rng(233);
  for (int t = 0; t < 8; ++t) {
    const auto ch = random_channel(rng, 2, 2, kTol);
    const auto channel = from_kraus(ch.kraus);
    const auto r = cesaro_projection(ch, kTol);
    check_certified(r.map);
    const int mult = oracle::eigenvalue_one_multiplicity(channel.transfer());
    CHECK(range_of(r.map, kTol).dim() == mult);
    CHECK(image_rank(r.map) == mult);
  }
}

TEST_CASE("Cesaro limit absorbs the channel") {
  Rng rng(239);
  for (int t = 0; t < 12; ++t) {
    const Index n = 2 + t % 4;
    const ChannelSpec ch = (t % 2 == 0) ? random_leaky_channel(rng, n, 1 + t % (n - 1), kTol)
                                        : random_channel(rng, n, 2, kTol);
    const auto r = cesaro_projection(ch, kTol);
    check_certified(r.map);
    ComplexMatrix t_mat = from_kraus(ch.kraus).transfer();
    if (r.used_dual) t_mat = t_mat.adjoint().eval();
    const ComplexMatrix& e = r.map.transfer();
    CHECK(operator_norm(e * t_mat - e) < kTol.eps_residual);
    CHECK(operator_norm(t_mat * e - e) < kTol.eps_residual);
    CHECK(range_of(r.map, kTol).dim() == oracle::eigenvalue_one_multiplicity(t_mat));
  }
}

TEST_CASE("Cesaro projection rejects channels that are neither contractive nor trace-preserving") {
  const ComplexMatrix big = 2.0 * ComplexMatrix::Identity(2, 2);
  CHECK_THROWS_AS(cesaro_projection(ChannelSpec::make({big}, kTol), kTol), Error);
}

TEST_CASE("Cesaro projection reports non-convergence") {
  Rng rng(241);
  const auto ch = random_channel(rng, 3, 2, kTol);
  try {
    cesaro_projection(ch, Tolerances{1e-8, 1e-8, 1e-10, 1e-30}, 3);
    FAIL("expected NoConvergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoConvergence);
  }
}

TEST_CASE("random_instance examples") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto m = random_instance(2, InstanceKind::pinch, seed, kTol);
    const Index d = range_of(m, kTol).dim();
    CHECK((d == 2 || d == 4));
  }
  const auto conj = random_instance(3, InstanceKind::conjugated, 7, kTol);
  const Index d = range_of(conj, kTol).dim();
  CHECK((d == 3 || d == 5 || d == 9));
  const auto ces = random_instance(2, InstanceKind::cesaro, 3, kTol);
  const auto c = certify_projection(ces, kTol);
  CHECK(c.cp);
  CHECK(c.contractive);
  CHECK(c.idempotent);
}

TEST_CASE("random_instance is certified and deterministic for every kind") {
  for (int kind = 0; kind < 4; ++kind) {
    for (Index n = 2; n <= 6; ++n) {
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto k = static_cast<InstanceKind>(kind);
        const auto a = random_instance(n, k, seed, kTol);
        const auto b = random_instance(n, k, seed, kTol);
        check_certified(a);
        CHECK(a.choi() == b.choi());
      }
    }
  }
}

TEST_CASE("random_instance validates its size") {
  CHECK_THROWS_AS(random_instance(1, InstanceKind::pinch, 0, kTol), Error);
  CHECK_THROWS_AS(random_instance(9, InstanceKind::pinch, 0, kTol), Error);
}

TEST_CASE("instance kinds round trip through their names") {
  for (int kind = 0; kind < 4; ++kind) {
    const auto k = static_cast<InstanceKind>(kind);
    CHECK(instance_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(instance_kind_from_string("bogus"), Error);
}

TEST_CASE("leaky cesaro instances can have ranges that are not product closed") {
  int found = 0;
  for (std::uint64_t seed = 0; seed < 12 && found == 0; ++seed) {
    const auto m = random_instance(4, InstanceKind::cesaro, seed, kTol);
    if (range_product_closure_residual(range_of(m, kTol), kTol) > 1e-4) ++found;
  }
  CHECK(found > 0);
}
