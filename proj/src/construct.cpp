// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#include "celab/construct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "celab/error.hpp"
#include "celab/random.hpp"

namespace celab {

namespace {

int default_rounds(Index n, int max_rounds) {
  return max_rounds > 0 ? max_rounds : static_cast<int>(n * n + 1);
}

std::vector<ComplexMatrix> adjoints(const std::vector<ComplexMatrix>& mats) {
  std::vector<ComplexMatrix> out;
  out.reserve(mats.size());
  for (const auto& m : mats) out.push_back(m.adjoint());
  return out;
}

// Applies the map to every column of a stack of vectorized matrices.
Eigen::MatrixXcd apply_columns(const CPMap& map, const Eigen::MatrixXcd& stacked) {
  return map.transfer() * stacked;
}

// min eigenvalue of the Hermitian part, -inf when the input is not Hermitian
// within tolerance.
double gated_min_eig(const ComplexMatrix& a, const Tolerances& tol) {
  try {
    return psd_check(a, tol).min_eig;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotHermitian) throw;
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace

OperatorSubspace range_of(const CPMap& map, const Tolerances& tol) {
  const auto cert = certificate_of(map, tol);
  if (!cert.idempotent) {
    throw Error(ErrorCode::UncertifiedMap,
                "range_of needs an idempotent map (residual " + std::to_string(cert.idem_residual) +
                    ")");
  }
  const Index n = map.ambient_dim();
  std::vector<ComplexMatrix> images;
  images.reserve(static_cast<std::size_t>(n * n));
  for (Index c = 0; c < n * n; ++c) images.push_back(unvec(map.transfer().col(c), n));
  return orthonormal_span(n, images, tol);
}

double algebra_closure_residual(const OperatorSubspace& s, const Tolerances& tol) {
  double worst = 0.0;
  for (const auto& a : s.basis()) {
    worst = std::max(worst, contains(s, a.adjoint(), tol).residual);
    for (const auto& b : s.basis()) worst = std::max(worst, contains(s, a * b, tol).residual);
  }
  return worst;
}

OperatorSubspace generated_algebra(const OperatorSubspace& generators, const Tolerances& tol,
                                   int max_rounds, int* rounds_used) {
  if (generators.is_zero()) {
    throw Error(ErrorCode::PreconditionFailed, "generated_algebra needs a nonzero subspace");
  }
  const Index n = generators.ambient_dim();
  const int limit = default_rounds(n, max_rounds);
  OperatorSubspace current = extend_span(generators, adjoints(generators.basis()), tol);
  int round = 0;
  while (true) {
    if (++round > limit) {
      throw Error(ErrorCode::MaxRoundsExceeded,
                  "algebra closure still growing after " + std::to_string(limit) + " rounds");
    }
    std::vector<ComplexMatrix> candidates;
    candidates.reserve(current.basis().size() * (current.basis().size() + 1));
    for (const auto& a : current.basis()) {
      candidates.push_back(a.adjoint());
      for (const auto& b : current.basis()) candidates.push_back(a * b);
    }
    OperatorSubspace next = extend_span(current, candidates, tol);
    const bool stable = next.dim() == current.dim();
    current = std::move(next);
    if (stable) break;
  }
  if (rounds_used) *rounds_used = round;
  const double residual = algebra_closure_residual(current, tol);
  if (residual > tol.eps_residual) {
    throw Error(ErrorCode::NotAnAlgebra,
                "closure residual " + std::to_string(residual) + " after stabilization");
  }
  return current;
}

AlgebraContext make_context(const CPMap& map, const Tolerances& tol, int max_rounds) {
  tol.validate();
  const auto cert = certificate_of(map, tol);
  if (!cert.is_projection()) {
    throw Error(ErrorCode::UncertifiedMap,
                "map is not a completely positive contractive idempotent");
  }
  AlgebraContext ctx{map.ambient_dim(), range_of(map, tol), OperatorSubspace(map.ambient_dim()),
                     map, cert, 0, 0.0};
  ctx.algebra = generated_algebra(ctx.range, tol, max_rounds, &ctx.closure_rounds);
  ctx.closure_residual = algebra_closure_residual(ctx.algebra, tol);

  for (const auto& r : ctx.range.basis()) {
    const auto m = contains(ctx.algebra, r, tol);
    if (!m.member) {
      throw Error(ErrorCode::NotAnAlgebra, "range is not contained in the generated algebra");
    }
  }
  for (const auto& a : ctx.algebra.basis()) {
    const auto m = contains(ctx.range, map(a), tol);
    if (!m.member) {
      throw Error(ErrorCode::NotInRange, "map sends the generated algebra outside its range");
    }
  }
  return ctx;
}

OperatorSubspace kernel_subspace(const AlgebraContext& ctx, const Tolerances& tol) {
  const auto& algebra = ctx.algebra;
  if (algebra.is_zero()) return OperatorSubspace(ctx.n);
  const Eigen::MatrixXcd images = apply_columns(ctx.map, algebra.frame());
  const Eigen::MatrixXcd null = null_space(images, tol.eps_rank);
  const Eigen::MatrixXcd kernel = algebra.frame() * null;
  std::vector<ComplexMatrix> basis;
  for (Index c = 0; c < kernel.cols(); ++c) basis.push_back(unvec(kernel.col(c), ctx.n));
  // Re-orthonormalize to absorb the rounding in frame * null.
  return orthonormal_span(ctx.n, basis, tol);
}

std::vector<ComplexMatrix> ideal_generators(const AlgebraContext& ctx) {
  std::vector<ComplexMatrix> out;
  const auto& r = ctx.range.basis();
  out.reserve(r.size() * r.size());
  for (const auto& x : r) {
    for (const auto& y : r) {
      const ComplexMatrix xy = x * y;
      out.push_back(xy - ctx.map(xy));
    }
  }
  return out;
}

IdealCertificate ideal_J(const AlgebraContext& ctx, const Tolerances& tol, int max_rounds) {
  const int limit = default_rounds(ctx.n, max_rounds);
  const auto generators = ideal_generators(ctx);

  IdealCertificate cert{OperatorSubspace(ctx.n), static_cast<int>(generators.size())};
  for (const auto& g : generators) {
    cert.generator_kernel_residual = std::max(cert.generator_kernel_residual, hs_norm(ctx.map(g)));
  }

  OperatorSubspace ideal = orthonormal_span(ctx.n, generators, tol);
  int round = 0;
  while (true) {
    if (++round > limit) {
      throw Error(ErrorCode::MaxRoundsExceeded,
                  "right ideal still growing after " + std::to_string(limit) + " rounds");
    }
    std::vector<ComplexMatrix> candidates;
    for (const auto& j : ideal.basis())
      for (const auto& a : ctx.algebra.basis()) candidates.push_back(j * a);
    OperatorSubspace next = extend_span(ideal, candidates, tol);
    const bool stable = next.dim() == ideal.dim();
    ideal = std::move(next);
    if (stable) break;
  }
  cert.rounds = round;

  for (const auto& j : ideal.basis()) {
    for (const auto& a : ctx.algebra.basis()) {
      cert.right_closure_residual =
          std::max(cert.right_closure_residual, contains(ideal, j * a, tol).residual);
      cert.left_closure_residual =
          std::max(cert.left_closure_residual, contains(ideal, a * j, tol).residual);
    }
  }
  cert.ideal = std::move(ideal);
  cert.kernel_gap = subspace_equal(cert.ideal, kernel_subspace(ctx, tol), tol).gap;
  return cert;
}

SubspaceComparison verify_kernel_equals_ideal(const AlgebraContext& ctx,
                                              const IdealCertificate& cert,
                                              const Tolerances& tol) {
  return subspace_equal(cert.ideal, kernel_subspace(ctx, tol), tol);
}

BilateralResult verify_bilateral(const AlgebraContext& ctx, const IdealCertificate& cert,
                                 const Tolerances& tol) {
  double worst = 0.0;
  for (const auto& a : ctx.algebra.basis())
    for (const auto& j : cert.ideal.basis())
      worst = std::max(worst, contains(cert.ideal, a * j, tol).residual);
  return {worst <= tol.eps_residual, worst};
}

Membership word_defect(const AlgebraContext& ctx, const IdealCertificate& cert,
                       std::span<const ComplexMatrix> word, const Tolerances& tol) {
  if (word.empty()) throw Error(ErrorCode::PreconditionFailed, "word must have length >= 1");
  ComplexMatrix u = ComplexMatrix::Identity(ctx.n, ctx.n);
  for (std::size_t i = 0; i < word.size(); ++i) {
    const auto m = contains(ctx.range, word[i], tol);
    if (!m.member) {
      throw Error(ErrorCode::LetterNotInRange,
                  "letter " + std::to_string(i) + " has range residual " +
                      std::to_string(m.residual));
    }
    u = (i == 0) ? word[i] : ComplexMatrix(u * word[i]);
  }
  return contains(cert.ideal, u - ctx.map(u), tol);
}

ComplexMatrix ce_product(const CPMap& map, const ComplexMatrix& x, const ComplexMatrix& y,
                         const Tolerances& tol) {
  for (const ComplexMatrix* op : {&x, &y}) {
    const double drift = hs_norm(map(*op) - *op);
    if (drift > tol.eps_residual * std::max(1.0, hs_norm(*op))) {
      throw Error(ErrorCode::NotInRange,
                  "operand is not fixed by the map (residual " + std::to_string(drift) + ")");
    }
  }
  return map(x * y);
}

CEAlgebra::CEAlgebra(OperatorSubspace range, std::vector<Complex> structure, ComplexMatrix unit)
    : range_(std::move(range)), structure_(std::move(structure)), unit_(std::move(unit)) {
  const auto d = static_cast<std::size_t>(range_.dim());
  if (structure_.size() != d * d * d) {
    throw Error(ErrorCode::DimensionMismatch, "structure constants must be d^3");
  }
}

Complex CEAlgebra::structure_constant(Index i, Index j, Index k) const {
  const Index d = dim();
  return structure_[static_cast<std::size_t>((i * d + j) * d + k)];
}

ComplexMatrix CEAlgebra::product(const ComplexMatrix& x, const ComplexMatrix& y) const {
  const Index d = dim();
  const ComplexVector cx = range_.coordinates(x);
  const ComplexVector cy = range_.coordinates(y);
  ComplexVector out = ComplexVector::Zero(d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      const Complex w = cx(i) * cy(j);
      if (w == Complex(0.0)) continue;
      for (Index k = 0; k < d; ++k) out(k) += w * structure_constant(i, j, k);
    }
  return range_.combine(out);
}

CEAlgebra build_ce_algebra(const AlgebraContext& ctx, const Tolerances& tol) {
  const auto& range = ctx.range;
  const auto& b = range.basis();
  const Index d = range.dim();
  const Index n = ctx.n;
  const auto& map = ctx.map;

  // products[i * d + j] = Phi(b_i b_j)
  std::vector<ComplexMatrix> products(static_cast<std::size_t>(d * d));
  std::vector<Complex> structure(static_cast<std::size_t>(d * d * d));
  double closure = 0.0;
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      auto& p = products[static_cast<std::size_t>(i * d + j)];
      p = map(b[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)]);
      const ComplexVector coords = range.coordinates(p);
      closure = std::max(closure, hs_norm(p - range.combine(coords)));
      for (Index k = 0; k < d; ++k) structure[static_cast<std::size_t>((i * d + j) * d + k)] = coords(k);
    }
  }
  auto c = [&](Index i, Index j, Index k) {
    return structure[static_cast<std::size_t>((i * d + j) * d + k)];
  };

  // e o b_i = b_i and b_i o e = b_i, linear in the coordinates of e.
  Eigen::MatrixXcd system(2 * d * d, d);
  ComplexVector rhs = ComplexVector::Zero(2 * d * d);
  for (Index i = 0; i < d; ++i) {
    for (Index k = 0; k < d; ++k) {
      for (Index l = 0; l < d; ++l) {
        system(i * d + k, l) = c(l, i, k);
        system(d * d + i * d + k, l) = c(i, l, k);
      }
      if (i == k) {
        rhs(i * d + k) = 1.0;
        rhs(d * d + i * d + k) = 1.0;
      }
    }
  }
  const ComplexVector unit_coords = system.completeOrthogonalDecomposition().solve(rhs);
  const ComplexMatrix unit = range.combine(unit_coords);

  double unit_residual = 0.0;
  double star = 0.0;
  for (Index i = 0; i < d; ++i) {
    const auto& bi = b[static_cast<std::size_t>(i)];
    unit_residual = std::max(unit_residual, hs_norm(map(unit * bi) - bi));
    unit_residual = std::max(unit_residual, hs_norm(map(bi * unit) - bi));
    for (Index j = 0; j < d; ++j) {
      const auto& bj = b[static_cast<std::size_t>(j)];
      const auto& p = products[static_cast<std::size_t>(i * d + j)];
      star = std::max(star, hs_norm(p.adjoint() - map(bj.adjoint() * bi.adjoint())));
    }
  }
  if (unit_residual > tol.eps_residual) {
    throw Error(ErrorCode::NoUnit, "unit law residual " + std::to_string(unit_residual));
  }

  // (b_i o b_j) o b_k vs b_i o (b_j o b_k), k batched through one GEMM.
  double assoc = 0.0;
  Eigen::MatrixXcd lhs(n * n, d);
  Eigen::MatrixXcd rhs_stack(n * n, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      const auto& pij = products[static_cast<std::size_t>(i * d + j)];
      for (Index k = 0; k < d; ++k) {
        lhs.col(k) = vec(pij * b[static_cast<std::size_t>(k)]);
        rhs_stack.col(k) =
            vec(b[static_cast<std::size_t>(i)] * products[static_cast<std::size_t>(j * d + k)]);
      }
      const Eigen::MatrixXcd diff = apply_columns(map, lhs - rhs_stack);
      assoc = std::max(assoc, diff.colwise().norm().maxCoeff());
    }
  }
  if (assoc > tol.eps_residual) {
    throw Error(ErrorCode::AssociativityFailed, "associativity residual " + std::to_string(assoc));
  }

  CEAlgebra algebra(range, std::move(structure), unit);
  algebra.closure_residual = closure;
  algebra.associativity_residual = assoc;
  algebra.unit_residual = unit_residual;
  algebra.star_residual = star;
  return algebra;
}

ComplexMatrix algebra_unit(const OperatorSubspace& algebra, const Tolerances& tol) {
  const Index n = algebra.ambient_dim();
  const Index d = algebra.dim();
  if (d == 0) throw Error(ErrorCode::NoUnit, "zero algebra");
  const Index n2 = n * n;
  const auto& a = algebra.basis();
  Eigen::MatrixXcd system(2 * d * n2, d);
  ComplexVector rhs(2 * d * n2);
  for (Index i = 0; i < d; ++i) {
    const auto& ai = a[static_cast<std::size_t>(i)];
    rhs.segment(i * n2, n2) = vec(ai);
    rhs.segment((d + i) * n2, n2) = vec(ai);
    for (Index l = 0; l < d; ++l) {
      const auto& al = a[static_cast<std::size_t>(l)];
      system.block(i * n2, l, n2, 1) = vec(al * ai);
      system.block((d + i) * n2, l, n2, 1) = vec(ai * al);
    }
  }
  const ComplexVector coords = system.colPivHouseholderQr().solve(rhs);
  const ComplexMatrix unit = algebra.combine(coords);
  double residual = 0.0;
  for (const auto& ai : a) {
    residual = std::max(residual, hs_norm(unit * ai - ai));
    residual = std::max(residual, hs_norm(ai * unit - ai));
  }
  if (residual > tol.eps_residual) {
    throw Error(ErrorCode::NoUnit, "unit residual " + std::to_string(residual));
  }
  return unit;
}

namespace {

constexpr double kClusterGap = 1e-6;
constexpr double kNoiseGap = 1e-10;
constexpr int kWedderburnAttempts = 8;

ComplexMatrix random_hermitian_central(Rng& rng, const std::vector<ComplexMatrix>& hermitian) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  ComplexMatrix h = ComplexMatrix::Zero(hermitian.front().rows(), hermitian.front().cols());
  for (const auto& q : hermitian) h += coef(rng) * q;
  return h;
}

}  // namespace

WedderburnDecomposition wedderburn(const OperatorSubspace& algebra, const Tolerances& tol,
                                   std::uint64_t seed) {
  const Index n = algebra.ambient_dim();
  const Index d = algebra.dim();
  if (d == 0) throw Error(ErrorCode::NotAnAlgebra, "zero subspace");
  const double closure = algebra_closure_residual(algebra, tol);
  if (closure > tol.eps_residual) {
    throw Error(ErrorCode::NotAnAlgebra, "closure residual " + std::to_string(closure));
  }
  const auto& a = algebra.basis();

  WedderburnDecomposition out;
  out.unit = algebra_unit(algebra, tol);

  // Center: coefficient vectors c with [sum_l c_l a_l, a_i] = 0 for all i.
  const Index n2 = n * n;
  Eigen::MatrixXcd commutators(d * n2, d);
  for (Index l = 0; l < d; ++l)
    for (Index i = 0; i < d; ++i) {
      const auto& al = a[static_cast<std::size_t>(l)];
      const auto& ai = a[static_cast<std::size_t>(i)];
      commutators.block(i * n2, l, n2, 1) = vec(al * ai - ai * al);
    }
  const Eigen::MatrixXcd center_coords = null_space(commutators, tol.eps_rank);
  out.center_dim = center_coords.cols();
  if (out.center_dim == 0) throw Error(ErrorCode::NotAnAlgebra, "trivial center");

  std::vector<ComplexMatrix> hermitian_center;
  for (Index c = 0; c < center_coords.cols(); ++c) {
    const ComplexMatrix z = algebra.combine(center_coords.col(c));
    hermitian_center.push_back((z + z.adjoint()) / 2.0);
    hermitian_center.push_back((z - z.adjoint()) / Complex(0.0, 2.0));
  }

  const ComplexMatrix complement = ComplexMatrix::Identity(n, n) - out.unit;
  std::string last_problem;
  for (int attempt = 0; attempt < kWedderburnAttempts; ++attempt) {
    out.attempts = attempt + 1;
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    ComplexMatrix h = random_hermitian_central(rng, hermitian_center);
    const double scale = operator_norm(h);
    if (scale < 1e-12) {
      last_problem = "degenerate central element";
      continue;
    }
    h /= scale;
    // Move the complement of the unit's support well away from [-1, 1].
    const ComplexMatrix shifted = h + 3.0 * complement;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((shifted + shifted.adjoint()) / 2.0);
    const auto& evals = es.eigenvalues();

    bool ambiguous = false;
    std::vector<std::pair<Index, Index>> clusters;  // [begin, end)
    Index begin = 0;
    for (Index i = 1; i <= n; ++i) {
      if (i < n) {
        const double gap = evals(i) - evals(i - 1);
        if (gap > kNoiseGap && gap <= kClusterGap) ambiguous = true;
        if (gap <= kClusterGap) continue;
      }
      clusters.emplace_back(begin, i);
      begin = i;
    }
    if (ambiguous) {
      last_problem = "eigenvalue gap below the cluster threshold";
      continue;
    }

    std::vector<ComplexMatrix> projections;
    for (const auto& [lo, hi] : clusters) {
      const Eigen::MatrixXcd v = es.eigenvectors().middleCols(lo, hi - lo);
      const ComplexMatrix p = out.unit * (v * v.adjoint());
      if (std::real(p.trace()) < 0.5) continue;
      projections.push_back((p + p.adjoint()) / 2.0);
    }
    if (static_cast<Index>(projections.size()) != out.center_dim) {
      last_problem = "found " + std::to_string(projections.size()) + " blocks for a center of dim " +
                     std::to_string(out.center_dim);
      continue;
    }

    double residual = 0.0;
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    for (std::size_t i = 0; i < projections.size(); ++i) {
      const auto& p = projections[i];
      sum += p;
      residual = std::max(residual, operator_norm(p * p - p));
      for (const auto& al : a) residual = std::max(residual, hs_norm(p * al - al * p));
      for (std::size_t j = i + 1; j < projections.size(); ++j)
        residual = std::max(residual, operator_norm(p * projections[j]));
    }
    residual = std::max(residual, operator_norm(sum - out.unit));

    // Re-split check: a fresh central element must be scalar on every block.
    Rng fresh(derive_seed(seed, 1000 + static_cast<std::uint64_t>(attempt)));
    const ComplexMatrix probe = random_hermitian_central(fresh, hermitian_center);
    for (const auto& p : projections) {
      const Complex scalar = (p * probe).trace() / p.trace();
      residual = std::max(residual, operator_norm(p * probe - scalar * p));
    }
    if (residual > tol.eps_residual) {
      last_problem = "projection residual " + std::to_string(residual);
      continue;
    }

    out.projection_residual = residual;
    out.block_dims.clear();
    for (const auto& p : projections) {
      std::vector<ComplexMatrix> cut;
      for (const auto& al : a) cut.push_back(p * al);
      const Index block_dim = orthonormal_span(n, cut, tol).dim();
      const auto size = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(block_dim))));
      const auto rank = static_cast<Index>(std::llround(std::real(p.trace())));
      if (size * size != block_dim || size == 0 || rank % size != 0) {
        throw Error(ErrorCode::NotAnAlgebra, "block of dimension " + std::to_string(block_dim) +
                                                 " and rank " + std::to_string(rank) +
                                                 " is not a full matrix block");
      }
      out.block_dims.push_back({size, rank / size});
    }
    out.central_projections = std::move(projections);
    out.in_J.assign(out.central_projections.size(), false);
    return out;
  }
  throw Error(ErrorCode::ClusterAmbiguity, "no clean split after " +
                                               std::to_string(kWedderburnAttempts) +
                                               " attempts: " + last_problem);
}

ComplexMatrix QuotientIso::to_range(const ComplexMatrix& b) const {
  return context.range.combine(forward * quotient.coordinates(b));
}

ComplexMatrix QuotientIso::to_quotient(const ComplexMatrix& r) const {
  return quotient.combine(inverse * context.range.coordinates(r));
}

double QuotientIso::quotient_norm(const ComplexMatrix& x) const {
  const ComplexMatrix y = to_quotient(x);
  double worst = 0.0;
  for (std::size_t i = 0; i < wedderburn.central_projections.size(); ++i) {
    if (wedderburn.in_J[i]) continue;
    worst = std::max(worst, operator_norm(wedderburn.central_projections[i] * y));
  }
  return worst;
}

QuotientIso quotient_iso(const AlgebraContext& ctx, const IdealCertificate& cert,
                         WedderburnDecomposition w, const Tolerances& tol) {
  const Index n = ctx.n;
  const auto& ideal = cert.ideal;
  const auto& a = ctx.algebra.basis();

  w.in_J.assign(w.central_projections.size(), false);
  ComplexMatrix block_unit = ComplexMatrix::Zero(n, n);
  Index expected_dim = 0;
  for (std::size_t i = 0; i < w.central_projections.size(); ++i) {
    const auto& p = w.central_projections[i];
    bool inside = true;
    for (const auto& al : a) {
      if (!contains(ideal, p * al, tol).member) {
        inside = false;
        break;
      }
    }
    bool disjoint = true;
    for (const auto& j : ideal.basis()) {
      if (hs_norm(p * j) > tol.eps_residual) {
        disjoint = false;
        break;
      }
    }
    if (!inside && !disjoint) {
      throw Error(ErrorCode::BlockSplitError,
                  "block " + std::to_string(i) + " is neither inside the ideal nor orthogonal to it");
    }
    w.in_J[i] = inside;
    if (!inside) {
      block_unit += p;
      expected_dim += w.block_dims[i].size * w.block_dims[i].size;
    }
  }

  std::vector<ComplexMatrix> compressed;
  for (const auto& al : a) compressed.push_back(block_unit * al);
  OperatorSubspace quotient = orthonormal_span(n, compressed, tol);
  if (quotient.dim() != expected_dim || quotient.dim() != ctx.range.dim()) {
    throw Error(ErrorCode::BlockSplitError,
                "dim B = " + std::to_string(quotient.dim()) + ", block count " +
                    std::to_string(expected_dim) + ", dim R = " + std::to_string(ctx.range.dim()));
  }
  const Index d = quotient.dim();

  Eigen::MatrixXcd forward(d, d);
  double outside = 0.0;
  for (Index l = 0; l < d; ++l) {
    const ComplexMatrix image = ctx.map(quotient[l]);
    forward.col(l) = ctx.range.coordinates(image);
    outside = std::max(outside, hs_norm(image - ctx.range.combine(forward.col(l))));
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(forward);
  if (lu.rank() != d) {
    throw Error(ErrorCode::BlockSplitError, "quotient map is singular");
  }

  QuotientIso iso{ctx, std::move(w), std::move(quotient), block_unit, ComplexMatrix(),
                  forward, lu.inverse()};
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(d, d);
  iso.roundtrip_residual = std::max({operator_norm(iso.forward * iso.inverse - eye),
                                     operator_norm(iso.inverse * iso.forward - eye), outside});
  for (const auto& r : ctx.range.basis()) {
    iso.compression_residual =
        std::max(iso.compression_residual, hs_norm(iso.to_quotient(r) - block_unit * r));
  }
  for (Index k = 0; k < d; ++k) {
    const ComplexMatrix rk = iso.to_range(iso.quotient[k]);
    for (Index l = 0; l < d; ++l) {
      const ComplexMatrix rl = iso.to_range(iso.quotient[l]);
      const ComplexMatrix lhs = iso.to_range(iso.quotient[k] * iso.quotient[l]);
      iso.intertwining_residual =
          std::max(iso.intertwining_residual, hs_norm(lhs - ctx.map(rk * rl)));
    }
  }
  iso.range_unit = iso.to_range(block_unit);
  return iso;
}

double OrderIsoReport::worst_min_eig() const {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& level : levels) {
    worst = std::min({worst, level.forward_min_eig, level.backward_min_eig});
  }
  return worst;
}

OrderIsoReport order_iso_check(const QuotientIso& iso, int k_max, int trials, std::uint64_t seed,
                               const Tolerances& tol) {
  const Index n = iso.context.n;
  OrderIsoReport report;
  for (int k = 1; k <= k_max; ++k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    OrderIsoLevel level;
    level.k = k;
    level.trials = trials;
    level.forward_min_eig = std::numeric_limits<double>::infinity();
    level.backward_min_eig = std::numeric_limits<double>::infinity();
    const auto kk = static_cast<std::size_t>(k);

    for (int t = 0; t < trials; ++t) {
      // Forward: Y^* Y in M_k(B) pushed through id_k (x) rho.
      std::vector<std::vector<ComplexMatrix>> y(kk, std::vector<ComplexMatrix>(kk));
      for (auto& row : y)
        for (auto& cell : row) cell = random_complex_combination(rng, iso.quotient);
      const ComplexMatrix big = ampliate(y);
      const ComplexMatrix positive = big.adjoint() * big;
      std::vector<std::vector<ComplexMatrix>> image(kk, std::vector<ComplexMatrix>(kk));
      for (std::size_t r = 0; r < kk; ++r)
        for (std::size_t c = 0; c < kk; ++c)
          image[r][c] = iso.to_range(positive.block(static_cast<Index>(r) * n,
                                                    static_cast<Index>(c) * n, n, n));
      level.forward_min_eig = std::min(level.forward_min_eig, gated_min_eig(ampliate(image), tol));

      // Backward: Hermitian G in M_k(R), shifted by I_k (x) unit until PSD.
      std::vector<std::vector<ComplexMatrix>> g(kk, std::vector<ComplexMatrix>(kk));
      std::vector<std::vector<ComplexMatrix>> shift(
          kk, std::vector<ComplexMatrix>(kk, ComplexMatrix::Zero(n, n)));
      for (std::size_t r = 0; r < kk; ++r) {
        shift[r][r] = iso.range_unit;
        for (std::size_t c = r; c < kk; ++c) {
          const ComplexMatrix h = random_complex_combination(rng, iso.context.range);
          if (r == c) {
            g[r][c] = (h + h.adjoint()) / 2.0;
          } else {
            g[r][c] = h;
            g[c][r] = h.adjoint();
          }
        }
      }
      const ComplexMatrix hermitian = ampliate(g);
      const ComplexMatrix unit_shift = ampliate(shift);
      const double norm = operator_norm(hermitian);
      const double step = norm > 0.0 ? 0.1 * norm : 1.0;
      std::optional<ComplexMatrix> accepted;
      for (int s = 0; s <= 1000; ++s) {
        const ComplexMatrix candidate = hermitian + (step * s) * unit_shift;
        if (psd_check(candidate, tol).is_psd) {
          accepted = candidate;
          break;
        }
      }
      if (!accepted) {
        ++level.shift_failures;
        continue;
      }
      std::vector<std::vector<ComplexMatrix>> pre(kk, std::vector<ComplexMatrix>(kk));
      for (std::size_t r = 0; r < kk; ++r)
        for (std::size_t c = 0; c < kk; ++c)
          pre[r][c] = iso.to_quotient(
              accepted->block(static_cast<Index>(r) * n, static_cast<Index>(c) * n, n, n));
      level.backward_min_eig = std::min(level.backward_min_eig, gated_min_eig(ampliate(pre), tol));
    }
    level.passed = level.forward_min_eig >= -tol.eps_psd &&
                   level.backward_min_eig >= -tol.eps_psd && level.shift_failures == 0;
    report.passed = report.passed && level.passed;
    report.levels.push_back(level);
  }
  return report;
}

double range_product_closure_residual(const OperatorSubspace& range, const Tolerances& tol) {
  double worst = 0.0;
  for (const auto& x : range.basis())
    for (const auto& y : range.basis()) worst = std::max(worst, contains(range, x * y, tol).residual);
  return worst;
}

IsometryReport unital_isometry_check(const QuotientIso& iso, int samples, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x150));
  IsometryReport report;
  report.samples = samples;
  report.min_ratio = std::numeric_limits<double>::infinity();
  report.max_ratio = 0.0;
  for (int s = 0; s < samples; ++s) {
    const ComplexMatrix x = random_complex_combination(rng, iso.context.range);
    const double ambient = operator_norm(x);
    if (ambient == 0.0) continue;
    const double ratio = iso.quotient_norm(x) / ambient;
    report.min_ratio = std::min(report.min_ratio, ratio);
    report.max_ratio = std::max(report.max_ratio, ratio);
    report.max_relative_deviation = std::max(report.max_relative_deviation, std::abs(ratio - 1.0));
  }
  return report;
}

}  // namespace celab
