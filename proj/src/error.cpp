// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#include "celab/error.hpp"

namespace celab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RaggedInput: return "RaggedInput";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NotCP: return "NotCP";
    case ErrorCode::UncertifiedMap: return "UncertifiedMap";
    case ErrorCode::InvalidPartition: return "InvalidPartition";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::NotAGroup: return "NotAGroup";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::IdempotencyFailed: return "IdempotencyFailed";
    case ErrorCode::MaxRoundsExceeded: return "MaxRoundsExceeded";
    case ErrorCode::LetterNotInRange: return "LetterNotInRange";
    case ErrorCode::NotInRange: return "NotInRange";
    case ErrorCode::NoUnit: return "NoUnit";
    case ErrorCode::AssociativityFailed: return "AssociativityFailed";
    case ErrorCode::ClusterAmbiguity: return "ClusterAmbiguity";
    case ErrorCode::NotAnAlgebra: return "NotAnAlgebra";
    case ErrorCode::BlockSplitError: return "BlockSplitError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::AmbiguousMapSpec: return "AmbiguousMapSpec";
  }
  return "Unknown";
}

}  // namespace celab
