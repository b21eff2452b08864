// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace celab {

using Complex = std::complex<double>;
using Index = Eigen::Index;

/// Dense square complex matrix. Every operator in the library is one of these.
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Numerical thresholds shared by every check.
///
/// The knobs are independent: `eps_rank` decides span ranks, the other three
/// gate Hermiticity, positivity, and equation residuals respectively.
struct Tolerances {
  double eps_herm = 1e-8;
  double eps_psd = 1e-8;
  double eps_rank = 1e-10;
  double eps_residual = 1e-8;

  /// Throws PreconditionFailed unless all four values are strictly positive.
  void validate() const;
};

/// A linear subspace of M_n stored through a Hilbert-Schmidt orthonormal basis.
///
/// The basis is also kept as the columns of an n^2 x d "frame" matrix of
/// column-stacked vectorizations, which makes projections a pair of GEMVs.
/// The zero subspace (empty basis) is a valid value.
class OperatorSubspace {
 public:
  explicit OperatorSubspace(Index ambient_dim);

  /// Adopts `basis` as is; throws PreconditionFailed when its Gram matrix
  /// deviates from the identity by more than 1e-8.
  OperatorSubspace(Index ambient_dim, std::vector<ComplexMatrix> basis);

  Index ambient_dim() const noexcept { return ambient_dim_; }
  Index dim() const noexcept { return static_cast<Index>(basis_.size()); }
  bool is_zero() const noexcept { return basis_.empty(); }

  const std::vector<ComplexMatrix>& basis() const noexcept { return basis_; }
  const ComplexMatrix& operator[](Index i) const { return basis_[static_cast<std::size_t>(i)]; }
  const Eigen::MatrixXcd& frame() const noexcept { return frame_; }

  /// Coefficients of the orthogonal projection of x in this basis.
  ComplexVector coordinates(const ComplexMatrix& x) const;
  ComplexMatrix combine(const ComplexVector& coeffs) const;
  ComplexMatrix project(const ComplexMatrix& x) const;

 private:
  Index ambient_dim_;
  std::vector<ComplexMatrix> basis_;
  Eigen::MatrixXcd frame_;
};

struct PsdResult {
  bool is_psd;
  double min_eig;
};

struct Membership {
  bool member;
  double residual;
};

struct SubspaceComparison {
  bool equal;
  double gap;
};

ComplexMatrix matrix_unit(Index n, Index i, Index j);
ComplexVector vec(const ComplexMatrix& x);
ComplexMatrix unvec(const ComplexVector& v, Index n);

/// trace(a^* b).
Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);
double hs_norm(const ComplexMatrix& a);

/// Largest singular value.
double operator_norm(const ComplexMatrix& a);

/// Throws NotHermitian when ||a - a^*|| > eps_herm; otherwise decides
/// positivity from the spectrum of the Hermitian part.
PsdResult psd_check(const ComplexMatrix& a, const Tolerances& tol);

/// Smallest eigenvalue of (a + a^*) / 2, no Hermiticity gate.
double min_hermitian_eigenvalue(const ComplexMatrix& a);

/// Positive square root of a PSD matrix. Eigenvalues in [-eps_psd, 0) are
/// clamped to zero; anything lower throws NotPSD.
ComplexMatrix psd_sqrt(const ComplexMatrix& a, const Tolerances& tol);

/// Modified Gram-Schmidt (two passes) in the HS inner product. Inputs whose
/// residual after projection falls below eps_rank * max(1, ||x||_HS) are
/// dropped.
OperatorSubspace orthonormal_span(Index ambient_dim, std::span<const ComplexMatrix> mats,
                                  const Tolerances& tol);

/// Same, seeded with an existing orthonormal basis that is kept verbatim.
OperatorSubspace extend_span(const OperatorSubspace& base, std::span<const ComplexMatrix> mats,
                             const Tolerances& tol);

Membership contains(const OperatorSubspace& s, const ComplexMatrix& x, const Tolerances& tol);

SubspaceComparison subspace_equal(const OperatorSubspace& s, const OperatorSubspace& t,
                                  const Tolerances& tol);

/// Assembles the (kn) x (kn) block matrix whose (i, j) block is blocks[i][j].
ComplexMatrix ampliate(const std::vector<std::vector<ComplexMatrix>>& blocks);

/// Right null space of `a`: orthonormal columns for singular values at most
/// cutoff * max(1, sigma_max).
Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& a, double cutoff);

}  // namespace celab
