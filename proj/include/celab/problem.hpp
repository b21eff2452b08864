// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "celab/cp_map.hpp"
#include "celab/linalg.hpp"

namespace celab {

using Json = nlohmann::ordered_json;

struct KrausSpec {
  std::vector<ComplexMatrix> operators;
};

struct ChoiSpec {
  ComplexMatrix choi;
};

/// A map described by one of the builders. `params` is kept as parsed and
/// validated again when the map is materialized.
struct BuilderSpec {
  std::string kind;  // pinch | group | conjugated | cesaro | random
  Json params;
  std::uint64_t seed = 0;
};

using MapSpec = std::variant<KrausSpec, ChoiSpec, BuilderSpec>;

struct ProblemFile {
  Index n = 0;
  MapSpec map_spec;
  Tolerances tolerances;
  std::vector<std::string> checks;  // empty: every check
  std::uint64_t seed = 0;           // drives every randomized check
  int k_max = 4;
};

/// Parses and validates a problem document. Also accepts a certificate report,
/// in which case the embedded problem is returned.
///
/// Throws ParseError (with a line number for syntax errors, or a field path
/// for schema errors), DimensionMismatch or AmbiguousMapSpec.
ProblemFile parse_problem(std::string_view text);
ProblemFile parse_problem(std::istream& in);
ProblemFile parse_problem_file(const std::string& path);

ProblemFile problem_from_json(const Json& doc);
Json to_json(const ProblemFile& p);

/// Builds the map the problem describes. Builder errors propagate unchanged.
CPMap materialize(const ProblemFile& p);

/// Complex numbers are [re, im] pairs; plain numbers are read as real.
Json complex_to_json(Complex z);
Json matrix_to_json(const ComplexMatrix& m);

/// Names of every pipeline check, in pipeline order.
const std::vector<std::string>& check_names();

}  // namespace celab
