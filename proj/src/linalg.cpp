// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#include "celab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "celab/error.hpp"

namespace celab {

namespace {

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()));
  }
}

}  // namespace

void Tolerances::validate() const {
  if (!(eps_herm > 0.0) || !(eps_psd > 0.0) || !(eps_rank > 0.0) || !(eps_residual > 0.0)) {
    throw Error(ErrorCode::PreconditionFailed, "tolerances must be strictly positive");
  }
}

OperatorSubspace::OperatorSubspace(Index ambient_dim)
    : ambient_dim_(ambient_dim), frame_(ambient_dim * ambient_dim, 0) {
  if (ambient_dim < 1) {
    throw Error(ErrorCode::PreconditionFailed, "ambient dimension must be positive");
  }
}

OperatorSubspace::OperatorSubspace(Index ambient_dim, std::vector<ComplexMatrix> basis)
    : ambient_dim_(ambient_dim), basis_(std::move(basis)) {
  if (ambient_dim < 1) {
    throw Error(ErrorCode::PreconditionFailed, "ambient dimension must be positive");
  }
  const Index n2 = ambient_dim * ambient_dim;
  frame_.resize(n2, dim());
  for (Index i = 0; i < dim(); ++i) {
    const auto& b = basis_[static_cast<std::size_t>(i)];
    if (b.rows() != ambient_dim || b.cols() != ambient_dim) {
      throw Error(ErrorCode::DimensionMismatch, "subspace basis element has wrong shape");
    }
    frame_.col(i) = Eigen::Map<const ComplexVector>(b.data(), n2);
  }
  if (dim() == 0) return;
  const Eigen::MatrixXcd gram = frame_.adjoint() * frame_;
  const double dev = (gram - Eigen::MatrixXcd::Identity(dim(), dim())).cwiseAbs().maxCoeff();
  if (dev > 1e-8) {
    throw Error(ErrorCode::PreconditionFailed,
                "basis is not orthonormal (Gram deviation " + std::to_string(dev) + ")");
  }
}

ComplexVector OperatorSubspace::coordinates(const ComplexMatrix& x) const {
  if (x.rows() != ambient_dim_ || x.cols() != ambient_dim_) {
    throw Error(ErrorCode::DimensionMismatch, "coordinates: matrix does not fit subspace");
  }
  return frame_.adjoint() * Eigen::Map<const ComplexVector>(x.data(), x.size());
}

ComplexMatrix OperatorSubspace::combine(const ComplexVector& coeffs) const {
  if (coeffs.size() != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "combine: coefficient count != dim");
  }
  return unvec(frame_ * coeffs, ambient_dim_);
}

ComplexMatrix OperatorSubspace::project(const ComplexMatrix& x) const {
  if (is_zero()) return ComplexMatrix::Zero(ambient_dim_, ambient_dim_);
  return combine(coordinates(x));
}

ComplexMatrix matrix_unit(Index n, Index i, Index j) {
  ComplexMatrix e = ComplexMatrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

ComplexVector vec(const ComplexMatrix& x) {
  return Eigen::Map<const ComplexVector>(x.data(), x.size());
}

ComplexMatrix unvec(const ComplexVector& v, Index n) {
  if (v.size() != n * n) {
    throw Error(ErrorCode::DimensionMismatch, "unvec: length is not n^2");
  }
  return Eigen::Map<const ComplexMatrix>(v.data(), n, n);
}

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "hs_inner");
  return (a.conjugate().cwiseProduct(b)).sum();
}

double hs_norm(const ComplexMatrix& a) { return a.norm(); }

double operator_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

double min_hermitian_eigenvalue(const ComplexMatrix& a) {
  const ComplexMatrix h = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

PsdResult psd_check(const ComplexMatrix& a, const Tolerances& tol) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "psd_check: matrix is not square");
  }
  const double herm = operator_norm(a - a.adjoint());
  if (herm > tol.eps_herm) {
    throw Error(ErrorCode::NotHermitian, "Hermiticity residual " + std::to_string(herm));
  }
  const double min_eig = min_hermitian_eigenvalue(a);
  return {min_eig >= -tol.eps_psd, min_eig};
}

ComplexMatrix psd_sqrt(const ComplexMatrix& a, const Tolerances& tol) {
  const auto check = psd_check(a, tol);
  if (!check.is_psd) {
    throw Error(ErrorCode::NotPSD, "minimum eigenvalue " + std::to_string(check.min_eig));
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((a + a.adjoint()) / 2.0);
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

namespace {

// Appends the normalized residual of each input to `basis`, two projection
// passes per candidate.
void gram_schmidt_into(Index n, std::vector<ComplexVector>& basis,
                       std::span<const ComplexMatrix> mats, const Tolerances& tol) {
  const Index n2 = n * n;
  for (const auto& m : mats) {
    if (m.rows() != n || m.cols() != n) {
      throw Error(ErrorCode::DimensionMismatch, "orthonormal_span: input matrix has wrong shape");
    }
    ComplexVector v = Eigen::Map<const ComplexVector>(m.data(), n2);
    const double scale = std::max(1.0, v.norm());
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) v -= q * q.dot(v);
    }
    const double residual = v.norm();
    if (residual < tol.eps_rank * scale) continue;
    basis.push_back(v / residual);
  }
}

OperatorSubspace to_subspace(Index n, const std::vector<ComplexVector>& vecs) {
  std::vector<ComplexMatrix> mats;
  mats.reserve(vecs.size());
  for (const auto& v : vecs) mats.push_back(unvec(v, n));
  return OperatorSubspace(n, std::move(mats));
}

}  // namespace

OperatorSubspace orthonormal_span(Index ambient_dim, std::span<const ComplexMatrix> mats,
                                  const Tolerances& tol) {
  std::vector<ComplexVector> basis;
  gram_schmidt_into(ambient_dim, basis, mats, tol);
  return to_subspace(ambient_dim, basis);
}

OperatorSubspace extend_span(const OperatorSubspace& base, std::span<const ComplexMatrix> mats,
                             const Tolerances& tol) {
  std::vector<ComplexVector> basis;
  basis.reserve(static_cast<std::size_t>(base.dim()) + mats.size());
  for (Index i = 0; i < base.dim(); ++i) basis.push_back(base.frame().col(i));
  gram_schmidt_into(base.ambient_dim(), basis, mats, tol);
  return to_subspace(base.ambient_dim(), basis);
}

Membership contains(const OperatorSubspace& s, const ComplexMatrix& x, const Tolerances& tol) {
  if (x.rows() != s.ambient_dim() || x.cols() != s.ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "contains: matrix does not fit subspace");
  }
  const double residual = hs_norm(x - s.project(x));
  return {residual <= tol.eps_residual * std::max(1.0, hs_norm(x)), residual};
}

SubspaceComparison subspace_equal(const OperatorSubspace& s, const OperatorSubspace& t,
                                  const Tolerances& tol) {
  if (s.ambient_dim() != t.ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "subspace_equal: ambient dimensions differ");
  }
  double gap = 0.0;
  for (const auto& b : s.basis()) gap = std::max(gap, contains(t, b, tol).residual);
  for (const auto& b : t.basis()) gap = std::max(gap, contains(s, b, tol).residual);
  return {gap <= tol.eps_residual, gap};
}

ComplexMatrix ampliate(const std::vector<std::vector<ComplexMatrix>>& blocks) {
  const auto k = static_cast<Index>(blocks.size());
  if (k == 0) throw Error(ErrorCode::RaggedInput, "ampliate: no blocks");
  const Index n = blocks[0].empty() ? 0 : blocks[0][0].rows();
  if (n == 0) throw Error(ErrorCode::RaggedInput, "ampliate: empty block");
  ComplexMatrix out(k * n, k * n);
  for (Index i = 0; i < k; ++i) {
    const auto& row = blocks[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != k) {
      throw Error(ErrorCode::RaggedInput, "ampliate: block rows have different lengths");
    }
    for (Index j = 0; j < k; ++j) {
      const auto& b = row[static_cast<std::size_t>(j)];
      if (b.rows() != n || b.cols() != n) {
        throw Error(ErrorCode::RaggedInput, "ampliate: blocks have different shapes");
      }
      out.block(i * n, j * n, n, n) = b;
    }
  }
  return out;
}

Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& a, double cutoff) {
  const Index cols = a.cols();
  if (cols == 0) return Eigen::MatrixXcd(0, 0);
  if (a.rows() == 0) return Eigen::MatrixXcd::Identity(cols, cols);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double threshold = cutoff * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > threshold) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

}  // namespace celab
