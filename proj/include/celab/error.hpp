// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace celab {

enum class ErrorCode {
  DimensionMismatch,
  RaggedInput,
  NotHermitian,
  NotPSD,
  NotCP,
  UncertifiedMap,
  InvalidPartition,
  NotUnitary,
  NotAGroup,
  PreconditionFailed,
  NoConvergence,
  IdempotencyFailed,
  MaxRoundsExceeded,
  LetterNotInRange,
  NotInRange,
  NoUnit,
  AssociativityFailed,
  ClusterAmbiguity,
  NotAnAlgebra,
  BlockSplitError,
  ParseError,
  AmbiguousMapSpec,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; `code()` lets callers
// branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace celab
