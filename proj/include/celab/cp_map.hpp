// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "celab/linalg.hpp"

namespace celab {

/// Outcome of testing a map for being a completely positive contractive
/// idempotent, plus two derived properties. Residuals are always filled in,
/// whatever the flags say.
struct ProjectionCertificate {
  bool cp = false;
  double choi_min_eig = 0.0;

  // Contractivity is only decided for CP maps, where ||Phi||_cb = ||Phi(I)||.
  bool contractive_decided = false;
  bool contractive = false;
  double norm_of_unit_image = 0.0;

  bool idempotent = false;
  double idem_residual = 0.0;

  bool unital = false;
  double unit_residual = 0.0;

  bool star_preserving = false;
  double star_residual = 0.0;

  bool is_projection() const noexcept { return cp && contractive && idempotent; }
};

/// A linear map on M_n.
///
/// The Choi matrix sum_ij e_ij (x) Phi(e_ij) is the canonical representation.
/// The column-stacking transfer matrix (vec(Phi(x)) = T vec(x)) is derived
/// once at construction and used for evaluation. Instances are immutable; a
/// certificate is attached by value through `with_certificate`, so there is
/// no lazily-written state to race on.
class CPMap {
 public:
  static CPMap from_choi(ComplexMatrix choi);
  static CPMap from_kraus(std::vector<ComplexMatrix> kraus);
  static CPMap from_transfer(ComplexMatrix transfer);

  Index ambient_dim() const noexcept { return n_; }
  const ComplexMatrix& choi() const noexcept { return choi_; }
  const ComplexMatrix& transfer() const noexcept { return transfer_; }
  const std::optional<std::vector<ComplexMatrix>>& kraus() const noexcept { return kraus_; }
  const std::optional<ProjectionCertificate>& certificate() const noexcept { return cert_; }

  CPMap with_certificate(ProjectionCertificate cert) const;

  ComplexMatrix operator()(const ComplexMatrix& x) const;

  /// Hilbert-Schmidt adjoint (the Heisenberg-picture map).
  CPMap dual() const;

 private:
  CPMap(Index n, ComplexMatrix choi, ComplexMatrix transfer);

  Index n_;
  ComplexMatrix choi_;
  ComplexMatrix transfer_;
  std::optional<std::vector<ComplexMatrix>> kraus_;
  std::optional<ProjectionCertificate> cert_;
};

/// x -> sum_k K_k x K_k^*.
CPMap from_kraus(std::vector<ComplexMatrix> kraus);

ComplexMatrix apply(const CPMap& map, const ComplexMatrix& x);

ComplexMatrix choi_of(const CPMap& map);

/// Kraus operators sqrt(lambda) * reshape(v) from the Choi eigenpairs with
/// lambda > eps_rank. Throws NotCP when the Choi matrix has an eigenvalue
/// below -eps_psd.
std::vector<ComplexMatrix> kraus_from_choi(const CPMap& map, const Tolerances& tol);

ComplexMatrix choi_from_transfer(const ComplexMatrix& transfer, Index n);
ComplexMatrix transfer_from_choi(const ComplexMatrix& choi, Index n);

ProjectionCertificate certify_projection(const CPMap& map, const Tolerances& tol);

/// The attached certificate if there is one, otherwise a fresh one.
ProjectionCertificate certificate_of(const CPMap& map, const Tolerances& tol);

/// Composition (a o b)(x) = a(b(x)).
CPMap compose(const CPMap& a, const CPMap& b);

struct KadisonSchwarzResult {
  bool holds;
  double min_eig;
};

/// Checks ||z^{1/2} y||^2 Phi(z) - Phi(zy) Phi(zy)^* >= 0 for a certified CP
/// contractive map and PSD z. Throws UncertifiedMap or NotPSD.
KadisonSchwarzResult kadison_schwarz_check(const CPMap& map, const ComplexMatrix& z,
                                           const ComplexMatrix& y, const Tolerances& tol);

}  // namespace celab
