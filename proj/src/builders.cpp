// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#include "celab/builders.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "celab/error.hpp"

namespace celab {

namespace {

constexpr std::size_t kMaxGroupOrder = 48;

void require_unitary(const ComplexMatrix& u, const Tolerances& tol) {
  if (u.rows() != u.cols()) throw Error(ErrorCode::NotUnitary, "matrix is not square");
  const double dev = operator_norm(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols()));
  if (dev > tol.eps_residual) {
    throw Error(ErrorCode::NotUnitary, "||u^* u - I|| = " + std::to_string(dev));
  }
}

// Builders promise certified projections; anything else is a bug upstream.
CPMap certified(CPMap map, const Tolerances& tol) {
  auto cert = certify_projection(map, tol);
  if (!cert.cp) throw Error(ErrorCode::NotCP, "builder output is not CP");
  if (!cert.idempotent) {
    throw Error(ErrorCode::IdempotencyFailed,
                "builder output idempotency residual " + std::to_string(cert.idem_residual));
  }
  if (!cert.contractive) {
    throw Error(ErrorCode::PreconditionFailed, "builder output is not contractive");
  }
  return map.with_certificate(cert);
}

std::vector<ComplexMatrix> block_projections(const Partition& p) {
  std::vector<ComplexMatrix> out;
  for (const auto& block : p.blocks()) {
    ComplexMatrix proj = ComplexMatrix::Zero(p.ambient_dim(), p.ambient_dim());
    for (Index i : block) proj(i, i) = 1.0;
    out.push_back(std::move(proj));
  }
  return out;
}

// Newton iteration toward the nearest idempotent; nullopt when it stalls.
std::optional<ComplexMatrix> polish_idempotent(const ComplexMatrix& s) {
  ComplexMatrix p = s;
  for (int it = 0; it < 200; ++it) {
    const ComplexMatrix p2 = p * p;
    const double defect = (p2 - p).norm();
    const double scale = std::max(1.0, p.norm());
    if (!std::isfinite(defect) || scale > 1e8) return std::nullopt;
    if (defect <= 1e-13 * scale) return p;
    p = 3.0 * p2 - 2.0 * p2 * p;
  }
  return std::nullopt;
}

}  // namespace

Partition::Partition(Index ambient_dim, std::vector<std::vector<Index>> blocks)
    : n_(ambient_dim), blocks_(std::move(blocks)) {
  if (n_ < 1) throw Error(ErrorCode::InvalidPartition, "ambient dimension must be positive");
  std::vector<int> seen(static_cast<std::size_t>(n_), 0);
  for (const auto& block : blocks_) {
    if (block.empty()) throw Error(ErrorCode::InvalidPartition, "empty block");
    for (Index i : block) {
      if (i < 0 || i >= n_) {
        throw Error(ErrorCode::InvalidPartition, "index " + std::to_string(i) + " out of range");
      }
      if (seen[static_cast<std::size_t>(i)]++ != 0) {
        throw Error(ErrorCode::InvalidPartition, "index " + std::to_string(i) + " repeated");
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw Error(ErrorCode::InvalidPartition, "blocks do not cover every index");
  }
}

Partition Partition::from_one_based(Index ambient_dim,
                                    const std::vector<std::vector<Index>>& blocks) {
  std::vector<std::vector<Index>> zero_based = blocks;
  for (auto& block : zero_based)
    for (auto& i : block) --i;
  return Partition(ambient_dim, std::move(zero_based));
}

Index Partition::range_dimension() const noexcept {
  Index total = 0;
  for (const auto& block : blocks_) total += static_cast<Index>(block.size() * block.size());
  return total;
}

ChannelSpec ChannelSpec::make(std::vector<ComplexMatrix> kraus, const Tolerances& tol) {
  if (kraus.empty()) throw Error(ErrorCode::PreconditionFailed, "channel needs Kraus operators");
  const Index n = kraus.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (const auto& k : kraus) {
    if (k.rows() != n || k.cols() != n) {
      throw Error(ErrorCode::DimensionMismatch, "channel Kraus operators differ in shape");
    }
    sum += k.adjoint() * k;
  }
  ChannelSpec spec;
  spec.trace_preserving = operator_norm(sum - ComplexMatrix::Identity(n, n)) <= tol.eps_residual;
  spec.kraus = std::move(kraus);
  return spec;
}

CPMap pinching(const Partition& p, const Tolerances& tol) {
  return certified(CPMap::from_kraus(block_projections(p)), tol);
}

CPMap conjugated_pinching(const ComplexMatrix& u, const Partition& p, const Tolerances& tol) {
  if (u.rows() != p.ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "unitary does not match partition dimension");
  }
  require_unitary(u, tol);
  auto kraus = block_projections(p);
  for (auto& k : kraus) k = u * k * u.adjoint();
  return certified(CPMap::from_kraus(std::move(kraus)), tol);
}

CPMap group_average(std::span<const ComplexMatrix> unitaries, const Tolerances& tol) {
  if (unitaries.empty()) throw Error(ErrorCode::NotAGroup, "empty group");
  if (unitaries.size() > kMaxGroupOrder) {
    throw Error(ErrorCode::NotAGroup, "groups are capped at 48 elements");
  }
  const Index n = unitaries.front().rows();
  for (const auto& u : unitaries) {
    if (u.rows() != n || u.cols() != n) {
      throw Error(ErrorCode::DimensionMismatch, "group elements differ in shape");
    }
    require_unitary(u, tol);
  }
  auto find = [&](const ComplexMatrix& x) {
    for (const auto& u : unitaries)
      if (operator_norm(x - u) <= tol.eps_residual) return true;
    return false;
  };
  for (std::size_t a = 0; a < unitaries.size(); ++a) {
    if (!find(unitaries[a].adjoint())) {
      throw Error(ErrorCode::NotAGroup, "element " + std::to_string(a) + " has no inverse");
    }
    for (std::size_t b = 0; b < unitaries.size(); ++b) {
      if (!find(unitaries[a] * unitaries[b])) {
        throw Error(ErrorCode::NotAGroup, "product of elements " + std::to_string(a) + " and " +
                                              std::to_string(b) + " is missing");
      }
    }
  }
  const double weight = 1.0 / std::sqrt(static_cast<double>(unitaries.size()));
  std::vector<ComplexMatrix> kraus;
  for (const auto& u : unitaries) kraus.push_back(u * weight);
  return certified(CPMap::from_kraus(std::move(kraus)), tol);
}

CesaroProjection cesaro_projection(const ChannelSpec& ch, const Tolerances& tol, int max_iter) {
  const CPMap channel = CPMap::from_kraus(ch.kraus);
  const Index n = channel.ambient_dim();
  const double unit_norm = operator_norm(channel(ComplexMatrix::Identity(n, n)));

  CesaroProjection result{channel, 0, 0.0, false};
  ComplexMatrix t;
  if (unit_norm <= 1.0 + tol.eps_residual) {
    t = channel.transfer();
  } else if (ch.trace_preserving) {
    t = channel.transfer().adjoint();
    result.used_dual = true;
  } else {
    throw Error(ErrorCode::PreconditionFailed,
                "channel is neither contractive nor trace-preserving");
  }

  ComplexMatrix mean = t;   // S_N
  ComplexMatrix power = t;  // T^N
  std::optional<ComplexMatrix> previous = polish_idempotent(mean);
  for (int m = 1; m <= max_iter; ++m) {
    mean = 0.5 * (mean + power * mean);
    power = power * power;
    std::optional<ComplexMatrix> current = polish_idempotent(mean);
    if (current && previous) {
      const double gap = operator_norm(*current - *previous);
      const double left = operator_norm(t * *current - *current);
      const double right = operator_norm(*current * t - *current);
      if (gap < tol.eps_residual && left < tol.eps_residual && right < tol.eps_residual) {
        CPMap limit = CPMap::from_transfer(*current);
        auto cert = certify_projection(limit, tol);
        if (cert.idem_residual > 10.0 * tol.eps_residual) {
          throw Error(ErrorCode::IdempotencyFailed,
                      "Cesaro limit idempotency residual " + std::to_string(cert.idem_residual));
        }
        if (!cert.cp || !cert.contractive) {
          throw Error(ErrorCode::NoConvergence,
                      "Cesaro limit is not a contractive CP map (Choi min eig " +
                          std::to_string(cert.choi_min_eig) + ")");
        }
        result.map = limit.with_certificate(cert);
        result.iterations = m;
        result.window_gap = gap;
        return result;
      }
    }
    previous = std::move(current);
  }
  throw Error(ErrorCode::NoConvergence,
              "Cesaro means did not settle within " + std::to_string(max_iter) + " doublings");
}

std::string_view to_string(InstanceKind kind) noexcept {
  switch (kind) {
    case InstanceKind::pinch: return "pinch";
    case InstanceKind::group: return "group";
    case InstanceKind::conjugated: return "conjugated";
    case InstanceKind::cesaro: return "cesaro";
  }
  return "unknown";
}

InstanceKind instance_kind_from_string(std::string_view name) {
  if (name == "pinch") return InstanceKind::pinch;
  if (name == "group") return InstanceKind::group;
  if (name == "conjugated") return InstanceKind::conjugated;
  if (name == "cesaro") return InstanceKind::cesaro;
  throw Error(ErrorCode::PreconditionFailed, "unknown instance kind '" + std::string(name) + "'");
}

ChannelSpec random_channel(Rng& rng, Index n, Index kraus_count, const Tolerances& tol) {
  const ComplexMatrix v = random_isometry(rng, n * kraus_count, n);
  std::vector<ComplexMatrix> kraus;
  for (Index k = 0; k < kraus_count; ++k) kraus.push_back(v.block(k * n, 0, n, n));
  return ChannelSpec::make(std::move(kraus), tol);
}

ChannelSpec random_leaky_channel(Rng& rng, Index n, Index block, const Tolerances& tol) {
  if (block < 1 || block >= n) {
    throw Error(ErrorCode::PreconditionFailed, "invariant block size must lie in [1, n)");
  }
  const Index rest = n - block;
  const ComplexMatrix frame = haar_unitary(rng, n);
  std::vector<ComplexMatrix> kraus;

  std::bernoulli_distribution use_pinch(0.5);
  if (use_pinch(rng) && block > 1) {
    ComplexMatrix w = ComplexMatrix::Identity(n, n);
    w.topLeftCorner(block, block) = haar_unitary(rng, block);
    for (const auto& cells : random_set_partition(rng, block)) {
      ComplexMatrix proj = ComplexMatrix::Zero(n, n);
      for (Index i : cells) proj(i, i) = 1.0;
      kraus.push_back(w * proj * w.adjoint());
    }
  } else {
    ComplexMatrix proj = ComplexMatrix::Zero(n, n);
    proj.topLeftCorner(block, block).setIdentity();
    kraus.push_back(proj);
  }

  constexpr Index kLeakOps = 2;
  const ComplexMatrix leak = random_isometry(rng, n * kLeakOps, rest);
  for (Index l = 0; l < kLeakOps; ++l) {
    ComplexMatrix k = ComplexMatrix::Zero(n, n);
    k.rightCols(rest) = leak.block(l * n, 0, n, rest);
    kraus.push_back(std::move(k));
  }
  for (auto& k : kraus) k = frame * k * frame.adjoint();
  return ChannelSpec::make(std::move(kraus), tol);
}

namespace {

std::vector<ComplexMatrix> random_group(Rng& rng, Index n) {
  const ComplexMatrix w = haar_unitary(rng, n);
  std::bernoulli_distribution cyclic(0.5);
  std::vector<ComplexMatrix> group;
  if (cyclic(rng)) {
    std::uniform_int_distribution<int> order_dist(2, 4);
    const int order = order_dist(rng);
    std::uniform_int_distribution<int> exponent(0, order - 1);
    std::vector<int> k(static_cast<std::size_t>(n));
    for (auto& e : k) e = exponent(rng);
    for (int j = 0; j < order; ++j) {
      ComplexVector diag(n);
      for (Index i = 0; i < n; ++i) {
        diag(i) = std::polar(1.0, 2.0 * std::numbers::pi * j * k[static_cast<std::size_t>(i)] /
                                      order);
      }
      group.push_back(w * diag.asDiagonal() * w.adjoint());
    }
    return group;
  }
  // Weyl-Heisenberg group of C^d, tensored with I_r, identity on the rest.
  std::uniform_int_distribution<Index> d_dist(2, std::min<Index>(3, n));
  const Index d = d_dist(rng);
  std::uniform_int_distribution<Index> r_dist(1, n / d);
  const Index r = r_dist(rng);
  const Complex omega = std::polar(1.0, 2.0 * std::numbers::pi / static_cast<double>(d));
  ComplexMatrix shift = ComplexMatrix::Zero(d, d);
  ComplexMatrix clock = ComplexMatrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) {
    shift((i + 1) % d, i) = 1.0;
    clock(i, i) = std::pow(omega, static_cast<double>(i));
  }
  ComplexMatrix shift_pow = ComplexMatrix::Identity(d, d);
  for (Index a = 0; a < d; ++a, shift_pow = shift * shift_pow) {
    ComplexMatrix clock_pow = ComplexMatrix::Identity(d, d);
    for (Index b = 0; b < d; ++b, clock_pow = clock * clock_pow) {
      for (Index c = 0; c < d; ++c) {
        const ComplexMatrix small = std::pow(omega, static_cast<double>(c)) * shift_pow * clock_pow;
        ComplexMatrix big = ComplexMatrix::Identity(n, n);
        for (Index x = 0; x < d; ++x)
          for (Index y = 0; y < d; ++y)
            for (Index s = 0; s < r; ++s) big(x * r + s, y * r + s) = small(x, y);
        group.push_back(w * big * w.adjoint());
      }
    }
  }
  return group;
}

}  // namespace

CPMap random_instance(Index n, InstanceKind kind, std::uint64_t seed, const Tolerances& tol) {
  if (n < 2 || n > 8) throw Error(ErrorCode::PreconditionFailed, "random_instance needs 2 <= n <= 8");
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(n) * 16 + static_cast<std::uint64_t>(kind)));
  switch (kind) {
    case InstanceKind::pinch:
      return pinching(Partition(n, random_set_partition(rng, n)), tol);
    case InstanceKind::conjugated: {
      const ComplexMatrix u = haar_unitary(rng, n);
      return conjugated_pinching(u, Partition(n, random_set_partition(rng, n)), tol);
    }
    case InstanceKind::group: {
      const auto group = random_group(rng, n);
      return group_average(group, tol);
    }
    case InstanceKind::cesaro: {
      std::string last_error;
      for (int attempt = 0; attempt < kCesaroRetries; ++attempt) {
        Rng local(derive_seed(rng(), static_cast<std::uint64_t>(attempt)));
        std::uniform_int_distribution<int> flavour(0, 3);
        ChannelSpec ch;
        if (flavour(local) < 3) {
          std::uniform_int_distribution<Index> block(1, n - 1);
          ch = random_leaky_channel(local, n, block(local), tol);
        } else {
          std::uniform_int_distribution<Index> count(2, n);
          ch = random_channel(local, n, count(local), tol);
        }
        try {
          return cesaro_projection(ch, tol).map;
        } catch (const Error& e) {
          last_error = e.what();
        }
      }
      throw Error(ErrorCode::NoConvergence, "cesaro instance failed after retries: " + last_error);
    }
  }
  throw Error(ErrorCode::PreconditionFailed, "unknown instance kind");
}

}  // namespace celab
