// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#include "celab/random.hpp"

#include <cmath>

#include "celab/error.hpp"

namespace celab {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ComplexMatrix gaussian_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  return g;
}

ComplexMatrix random_isometry(Rng& rng, Index rows, Index cols) {
  if (rows < cols) throw Error(ErrorCode::PreconditionFailed, "isometry needs rows >= cols");
  const ComplexMatrix g = gaussian_matrix(rng, rows, cols);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(rows, cols);
  const ComplexMatrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Index j = 0; j < cols; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

ComplexMatrix haar_unitary(Rng& rng, Index n) { return random_isometry(rng, n, n); }

ComplexMatrix random_real_combination(Rng& rng, const OperatorSubspace& s) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  ComplexVector c(s.dim());
  for (Index i = 0; i < s.dim(); ++i) c(i) = coef(rng);
  if (s.is_zero()) return ComplexMatrix::Zero(s.ambient_dim(), s.ambient_dim());
  return s.combine(c);
}

ComplexMatrix random_complex_combination(Rng& rng, const OperatorSubspace& s) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  ComplexVector c(s.dim());
  for (Index i = 0; i < s.dim(); ++i) {
    const double re = coef(rng);
    const double im = coef(rng);
    c(i) = Complex(re, im);
  }
  if (s.is_zero()) return ComplexMatrix::Zero(s.ambient_dim(), s.ambient_dim());
  return s.combine(c);
}

std::vector<std::vector<Index>> random_set_partition(Rng& rng, Index n) {
  std::vector<std::vector<Index>> blocks;
  for (Index i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, blocks.size());
    const std::size_t b = pick(rng);
    if (b == blocks.size()) blocks.emplace_back();
    blocks[b].push_back(i);
  }
  return blocks;
}

}  // namespace celab
