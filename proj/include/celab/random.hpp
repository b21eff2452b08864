// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "celab/linalg.hpp"

namespace celab {

/// All randomized code uses a 64-bit Mersenne twister seeded explicitly.
/// Distributions come from <random>, so streams are reproducible on one
/// standard library but not promised bitwise across platforms.
using Rng = std::mt19937_64;

/// Derives an independent stream seed from (seed, salt) via splitmix64.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

/// Entries i.i.d. with independent N(0, 1/2) real and imaginary parts.
ComplexMatrix gaussian_matrix(Rng& rng, Index rows, Index cols);

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal absorbed into Q.
ComplexMatrix haar_unitary(Rng& rng, Index n);

/// rows x cols matrix with orthonormal columns (rows >= cols).
ComplexMatrix random_isometry(Rng& rng, Index rows, Index cols);

/// Real coefficients uniform in [-1, 1] against the subspace basis.
ComplexMatrix random_real_combination(Rng& rng, const OperatorSubspace& s);

/// Complex coefficients with real and imaginary parts uniform in [-1, 1].
ComplexMatrix random_complex_combination(Rng& rng, const OperatorSubspace& s);

/// Random set partition of {0..n-1}: each element joins an existing block or
/// opens a new one with equal odds over the available choices.
std::vector<std::vector<Index>> random_set_partition(Rng& rng, Index n);

}  // namespace celab
