// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "celab/cp_map.hpp"
#include "celab/linalg.hpp"

namespace celab {

/// A certified projection together with its range R and the C*-algebra A0
/// generated by R. Everything downstream works inside A0; the kernel of the
/// map on the full M_n is never needed.
struct AlgebraContext {
  Index n = 0;
  OperatorSubspace range;
  OperatorSubspace algebra;
  CPMap map;
  ProjectionCertificate certificate;
  int closure_rounds = 0;
  double closure_residual = 0.0;  // product/adjoint closure of the algebra basis
};

/// Builds and validates the context. Throws UncertifiedMap for maps that are
/// not CP contractive idempotents, NotAnAlgebra when a context invariant fails.
AlgebraContext make_context(const CPMap& map, const Tolerances& tol, int max_rounds = 0);

/// span{Phi(e_ij)}. Throws UncertifiedMap unless the map is idempotent.
OperatorSubspace range_of(const CPMap& map, const Tolerances& tol);

/// Smallest adjoint- and product-closed subspace containing `generators`.
/// `max_rounds <= 0` means n^2 + 1. Throws MaxRoundsExceeded.
OperatorSubspace generated_algebra(const OperatorSubspace& generators, const Tolerances& tol,
                                   int max_rounds = 0, int* rounds_used = nullptr);

/// Largest residual of b_i b_j and b_i^* against the subspace.
double algebra_closure_residual(const OperatorSubspace& s, const Tolerances& tol);

/// Null space of Phi restricted to A0.
OperatorSubspace kernel_subspace(const AlgebraContext& ctx, const Tolerances& tol);

/// x y - Phi(x y) for every ordered pair of range basis elements.
std::vector<ComplexMatrix> ideal_generators(const AlgebraContext& ctx);

struct IdealCertificate {
  OperatorSubspace ideal;
  int generator_count = 0;
  int rounds = 0;
  double generator_kernel_residual = 0.0;  // max ||Phi(g)||_HS over generators
  double right_closure_residual = 0.0;
  double left_closure_residual = 0.0;
  double kernel_gap = 0.0;
};

/// Right ideal of A0 generated by the range-product defects, closed under
/// right multiplication by A0 until the dimension is stable.
IdealCertificate ideal_J(const AlgebraContext& ctx, const Tolerances& tol, int max_rounds = 0);

SubspaceComparison verify_kernel_equals_ideal(const AlgebraContext& ctx,
                                              const IdealCertificate& cert,
                                              const Tolerances& tol);

struct BilateralResult {
  bool bilateral;
  double left_residual;
};

/// max over (a, j) in basis(A0) x basis(J) of the residual of a j in J.
BilateralResult verify_bilateral(const AlgebraContext& ctx, const IdealCertificate& cert,
                                 const Tolerances& tol);

/// For u = x_1 ... x_k with every x_i in the range: membership of u - Phi(u)
/// in J. Throws LetterNotInRange or PreconditionFailed for an empty word.
Membership word_defect(const AlgebraContext& ctx, const IdealCertificate& cert,
                       std::span<const ComplexMatrix> word, const Tolerances& tol);

/// The range product x o y = Phi(x y). Throws NotInRange unless both
/// operands are fixed by the map.
ComplexMatrix ce_product(const CPMap& map, const ComplexMatrix& x, const ComplexMatrix& y,
                         const Tolerances& tol = {});

/// The range with the product x o y, as structure constants on the range basis.
class CEAlgebra {
 public:
  CEAlgebra(OperatorSubspace range, std::vector<Complex> structure, ComplexMatrix unit);

  const OperatorSubspace& range() const noexcept { return range_; }
  Index dim() const noexcept { return range_.dim(); }
  const ComplexMatrix& unit() const noexcept { return unit_; }

  /// Coefficient of b_k in b_i o b_j.
  Complex structure_constant(Index i, Index j, Index k) const;

  /// x o y computed from the structure constants (both operands are first
  /// projected onto the range).
  ComplexMatrix product(const ComplexMatrix& x, const ComplexMatrix& y) const;

  double closure_residual = 0.0;
  double associativity_residual = 0.0;
  double unit_residual = 0.0;
  double star_residual = 0.0;

 private:
  OperatorSubspace range_;
  std::vector<Complex> structure_;
  ComplexMatrix unit_;
};

/// Throws NoUnit or AssociativityFailed when the corresponding residual
/// exceeds eps_residual.
CEAlgebra build_ce_algebra(const AlgebraContext& ctx, const Tolerances& tol);

struct BlockDim {
  Index size = 0;          // n_i: the block is M_{n_i}
  Index multiplicity = 0;  // m_i: rank(p_i) = n_i m_i
};

struct WedderburnDecomposition {
  std::vector<ComplexMatrix> central_projections;
  std::vector<BlockDim> block_dims;
  std::vector<bool> in_J;  // filled by quotient_iso
  ComplexMatrix unit;      // unit of A0
  Index center_dim = 0;
  int attempts = 0;        // central elements drawn until a clean split
  double projection_residual = 0.0;
};

/// Minimal central projections via spectral clustering of a random Hermitian
/// central element (gap threshold 1e-6, up to 8 reseeds). Throws
/// NotAnAlgebra, NoUnit or ClusterAmbiguity.
WedderburnDecomposition wedderburn(const OperatorSubspace& algebra, const Tolerances& tol,
                                   std::uint64_t seed);

/// Unit of an algebra of matrices, by least squares over its basis.
/// Throws NoUnit when the residual exceeds eps_residual.
ComplexMatrix algebra_unit(const OperatorSubspace& algebra, const Tolerances& tol);

/// rho : B = A0 / J -> R, with B realized concretely as p_B A0 where p_B sums
/// the central projections of the blocks not contained in J.
struct QuotientIso {
  AlgebraContext context;
  WedderburnDecomposition wedderburn;
  OperatorSubspace quotient;     // basis of B inside A0
  ComplexMatrix quotient_unit;   // p_B
  ComplexMatrix range_unit;      // rho(p_B), the order unit of R
  Eigen::MatrixXcd forward;      // dim R x dim B, coordinates
  Eigen::MatrixXcd inverse;      // dim B x dim R
  double roundtrip_residual = 0.0;
  double intertwining_residual = 0.0;
  double compression_residual = 0.0;  // inverse vs. r -> p_B r

  ComplexMatrix to_range(const ComplexMatrix& b) const;
  ComplexMatrix to_quotient(const ComplexMatrix& r) const;
  /// max block norm over the blocks of B of to_quotient(x).
  double quotient_norm(const ComplexMatrix& x) const;
};

/// Throws BlockSplitError when a block is neither inside J nor orthogonal to
/// it, or when the dimensions of B and R disagree.
QuotientIso quotient_iso(const AlgebraContext& ctx, const IdealCertificate& cert,
                         WedderburnDecomposition w, const Tolerances& tol);

struct OrderIsoLevel {
  int k = 0;
  int trials = 0;
  double forward_min_eig = 0.0;   // images of PSD elements of M_k(B)
  double backward_min_eig = 0.0;  // preimages of PSD elements of M_k(R)
  int shift_failures = 0;         // Hermitian draws that never became PSD
  bool passed = false;
};

struct OrderIsoReport {
  std::vector<OrderIsoLevel> levels;
  bool passed = true;
  double worst_min_eig() const;
};

OrderIsoReport order_iso_check(const QuotientIso& iso, int k_max, int trials, std::uint64_t seed,
                               const Tolerances& tol);

/// Largest residual of b_i b_j against the range: zero when the range is
/// already a subalgebra.
double range_product_closure_residual(const OperatorSubspace& range, const Tolerances& tol);

struct IsometryReport {
  int samples = 0;
  double min_ratio = 0.0;  // quotient norm / operator norm
  double max_ratio = 0.0;
  double max_relative_deviation = 0.0;
};

IsometryReport unital_isometry_check(const QuotientIso& iso, int samples, std::uint64_t seed);

}  // namespace celab
