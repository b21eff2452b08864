// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#include "celab/cp_map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "celab/error.hpp"

namespace celab {

namespace {

Index root_of_square(Index n2) {
  auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n2))));
  if (n < 1 || n * n != n2) {
    throw Error(ErrorCode::DimensionMismatch,
                "superoperator dimension " + std::to_string(n2) + " is not a perfect square");
  }
  return n;
}

}  // namespace

ComplexMatrix choi_from_transfer(const ComplexMatrix& transfer, Index n) {
  ComplexMatrix choi(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b) choi(i * n + a, j * n + b) = transfer(a + b * n, i + j * n);
  return choi;
}

ComplexMatrix transfer_from_choi(const ComplexMatrix& choi, Index n) {
  ComplexMatrix transfer(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b) transfer(a + b * n, i + j * n) = choi(i * n + a, j * n + b);
  return transfer;
}

CPMap::CPMap(Index n, ComplexMatrix choi, ComplexMatrix transfer)
    : n_(n), choi_(std::move(choi)), transfer_(std::move(transfer)) {}

CPMap CPMap::from_choi(ComplexMatrix choi) {
  if (choi.rows() != choi.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "Choi matrix must be square");
  }
  const Index n = root_of_square(choi.rows());
  ComplexMatrix transfer = transfer_from_choi(choi, n);
  return CPMap(n, std::move(choi), std::move(transfer));
}

CPMap CPMap::from_transfer(ComplexMatrix transfer) {
  if (transfer.rows() != transfer.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "transfer matrix must be square");
  }
  const Index n = root_of_square(transfer.rows());
  ComplexMatrix choi = choi_from_transfer(transfer, n);
  return CPMap(n, std::move(choi), std::move(transfer));
}

CPMap CPMap::from_kraus(std::vector<ComplexMatrix> kraus) {
  if (kraus.empty()) throw Error(ErrorCode::PreconditionFailed, "from_kraus: empty Kraus list");
  const Index n = kraus.front().rows();
  ComplexMatrix choi = ComplexMatrix::Zero(n * n, n * n);
  ComplexVector w(n * n);
  for (const auto& k : kraus) {
    if (k.rows() != n || k.cols() != n) {
      throw Error(ErrorCode::DimensionMismatch, "from_kraus: Kraus operators differ in shape");
    }
    for (Index i = 0; i < n; ++i)
      for (Index a = 0; a < n; ++a) w(i * n + a) = k(a, i);
    choi.noalias() += w * w.adjoint();
  }
  ComplexMatrix transfer = transfer_from_choi(choi, n);
  CPMap map(n, std::move(choi), std::move(transfer));
  map.kraus_ = std::move(kraus);
  return map;
}

CPMap CPMap::with_certificate(ProjectionCertificate cert) const {
  CPMap copy = *this;
  copy.cert_ = cert;
  return copy;
}

ComplexMatrix CPMap::operator()(const ComplexMatrix& x) const {
  if (x.rows() != n_ || x.cols() != n_) {
    throw Error(ErrorCode::DimensionMismatch, "apply: argument does not match map dimension");
  }
  const ComplexVector out = transfer_ * Eigen::Map<const ComplexVector>(x.data(), x.size());
  return unvec(out, n_);
}

CPMap CPMap::dual() const {
  if (kraus_) {
    std::vector<ComplexMatrix> adj;
    adj.reserve(kraus_->size());
    for (const auto& k : *kraus_) adj.push_back(k.adjoint());
    return CPMap::from_kraus(std::move(adj));
  }
  return CPMap::from_transfer(transfer_.adjoint());
}

CPMap from_kraus(std::vector<ComplexMatrix> kraus) { return CPMap::from_kraus(std::move(kraus)); }

ComplexMatrix apply(const CPMap& map, const ComplexMatrix& x) { return map(x); }

ComplexMatrix choi_of(const CPMap& map) { return map.choi(); }

std::vector<ComplexMatrix> kraus_from_choi(const CPMap& map, const Tolerances& tol) {
  const Index n = map.ambient_dim();
  const ComplexMatrix& choi = map.choi();
  const double herm = operator_norm(choi - choi.adjoint());
  if (herm > tol.eps_herm) {
    throw Error(ErrorCode::NotCP, "Choi matrix is not Hermitian (residual " +
                                      std::to_string(herm) + ")");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((choi + choi.adjoint()) / 2.0);
  const auto& evals = es.eigenvalues();
  if (evals(0) < -tol.eps_psd) {
    throw Error(ErrorCode::NotCP, "Choi eigenvalue " + std::to_string(evals(0)));
  }
  std::vector<ComplexMatrix> kraus;
  for (Index e = evals.size() - 1; e >= 0; --e) {
    if (evals(e) <= tol.eps_rank) break;
    const ComplexVector v = es.eigenvectors().col(e) * std::sqrt(evals(e));
    ComplexMatrix k(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index a = 0; a < n; ++a) k(a, i) = v(i * n + a);
    kraus.push_back(std::move(k));
  }
  return kraus;
}

ProjectionCertificate certify_projection(const CPMap& map, const Tolerances& tol) {
  const Index n = map.ambient_dim();
  const ComplexMatrix& t = map.transfer();
  ProjectionCertificate cert;

  const ComplexMatrix& choi = map.choi();
  cert.choi_min_eig = min_hermitian_eigenvalue(choi);
  const double choi_herm = operator_norm(choi - choi.adjoint());
  cert.cp = choi_herm <= tol.eps_herm && cert.choi_min_eig >= -tol.eps_psd;

  const ComplexMatrix unit_image = map(ComplexMatrix::Identity(n, n));
  cert.norm_of_unit_image = operator_norm(unit_image);
  cert.contractive_decided = cert.cp;
  cert.contractive = cert.cp && cert.norm_of_unit_image <= 1.0 + tol.eps_residual;

  // Column (i + j n) of T^2 - T is vec(Phi(Phi(e_ij)) - Phi(e_ij)).
  const ComplexMatrix defect = t * t - t;
  cert.idem_residual = defect.colwise().norm().maxCoeff();
  cert.idempotent = cert.idem_residual <= tol.eps_residual;

  cert.unit_residual = operator_norm(unit_image - ComplexMatrix::Identity(n, n));
  cert.unital = cert.unit_residual <= tol.eps_residual;

  double star = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const ComplexMatrix img = unvec(t.col(i + j * n), n);
      const ComplexMatrix img_adj = unvec(t.col(j + i * n), n);
      star = std::max(star, hs_norm(img_adj - img.adjoint()));
    }
  }
  cert.star_residual = star;
  cert.star_preserving = star <= tol.eps_residual;
  return cert;
}

ProjectionCertificate certificate_of(const CPMap& map, const Tolerances& tol) {
  if (map.certificate()) return *map.certificate();
  return certify_projection(map, tol);
}

CPMap compose(const CPMap& a, const CPMap& b) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "compose: maps act on different algebras");
  }
  return CPMap::from_transfer(a.transfer() * b.transfer());
}

KadisonSchwarzResult kadison_schwarz_check(const CPMap& map, const ComplexMatrix& z,
                                           const ComplexMatrix& y, const Tolerances& tol) {
  const auto cert = certificate_of(map, tol);
  if (!cert.cp || !cert.contractive) {
    throw Error(ErrorCode::UncertifiedMap, "Kadison-Schwarz needs a CP contractive map");
  }
  if (z.rows() != map.ambient_dim() || y.rows() != map.ambient_dim() || y.cols() != y.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "kadison_schwarz_check: operand shapes");
  }
  const ComplexMatrix root = psd_sqrt(z, tol);
  const double factor = std::pow(operator_norm(root * y), 2);
  const ComplexMatrix image = map(z * y);
  const ComplexMatrix defect = factor * map(z) - image * image.adjoint();
  try {
    const auto psd = psd_check(defect, tol);
    return {psd.is_psd, psd.min_eig};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotHermitian) throw;
    return {false, min_hermitian_eigenvalue(defect)};
  }
}

}  // namespace celab
