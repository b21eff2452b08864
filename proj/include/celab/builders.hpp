// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "celab/cp_map.hpp"
#include "celab/linalg.hpp"
#include "celab/random.hpp"

namespace celab {

/// Disjoint nonempty index blocks covering {0..n-1}.
class Partition {
 public:
  /// Throws InvalidPartition unless the blocks are disjoint, nonempty and cover.
  Partition(Index ambient_dim, std::vector<std::vector<Index>> blocks);

  /// Same, from 1-based indices as written in problem files.
  static Partition from_one_based(Index ambient_dim, const std::vector<std::vector<Index>>& blocks);

  Index ambient_dim() const noexcept { return n_; }
  const std::vector<std::vector<Index>>& blocks() const noexcept { return blocks_; }

  /// sum over blocks of |b|^2, the dimension of the block-diagonal algebra.
  Index range_dimension() const noexcept;

 private:
  Index n_;
  std::vector<std::vector<Index>> blocks_;
};

/// Kraus description of a channel; `trace_preserving` is certified by `make`.
struct ChannelSpec {
  std::vector<ComplexMatrix> kraus;
  bool trace_preserving = false;

  static ChannelSpec make(std::vector<ComplexMatrix> kraus, const Tolerances& tol);
};

CPMap pinching(const Partition& p, const Tolerances& tol = {});

/// (1/|G|) sum_g u_g x u_g^*. The list must be a group (at most 48 elements)
/// up to eps_residual; throws NotUnitary or NotAGroup otherwise.
CPMap group_average(std::span<const ComplexMatrix> unitaries, const Tolerances& tol = {});

/// u pinch(u^* x u) u^*.
CPMap conjugated_pinching(const ComplexMatrix& u, const Partition& p, const Tolerances& tol = {});

struct CesaroProjection {
  CPMap map;
  int iterations = 0;     // doublings performed
  double window_gap = 0;  // distance between the last two polished windows
  bool used_dual = false; // averaged the Heisenberg-picture channel
};

/// Limit of the Cesaro means (1/N) sum_{k=1..N} T^k over doubling windows
/// N = 2^m. Each window mean is polished to the nearest idempotent with
/// P <- 3P^2 - 2P^3; the loop stops once two consecutive polished windows
/// agree and absorb T within eps_residual.
///
/// A contractive channel (||T(I)|| <= 1) is averaged as given. A trace-
/// preserving channel that is not contractive is averaged in the Heisenberg
/// picture, where it is unital. Throws NoConvergence after `max_iter`
/// doublings and IdempotencyFailed if the limit's idempotency residual
/// exceeds 10 eps_residual.
CesaroProjection cesaro_projection(const ChannelSpec& ch, const Tolerances& tol, int max_iter = 64);

enum class InstanceKind { pinch, group, conjugated, cesaro };

std::string_view to_string(InstanceKind kind) noexcept;
/// Throws PreconditionFailed for unknown names.
InstanceKind instance_kind_from_string(std::string_view name);

/// Deterministic in (n, kind, seed) on a given platform. Requires 2 <= n <= 8.
/// The cesaro kind retries with derived seeds up to `kCesaroRetries` times.
CPMap random_instance(Index n, InstanceKind kind, std::uint64_t seed, const Tolerances& tol = {});

inline constexpr int kCesaroRetries = 16;

/// Random trace-preserving channel from a Haar-like isometry C^n -> C^n (x) C^r.
ChannelSpec random_channel(Rng& rng, Index n, Index kraus_count, const Tolerances& tol = {});

/// Random trace-preserving channel that keeps a block of size m invariant
/// (acting there as the identity or as a conjugated pinching) and leaks the
/// complement into the whole space. Its Heisenberg fixed points are a
/// non-multiplicative graph {a + F(a)} over the block algebra.
ChannelSpec random_leaky_channel(Rng& rng, Index n, Index block, const Tolerances& tol = {});

}  // namespace celab
