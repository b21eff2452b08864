// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#include "celab/problem.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include "celab/builders.hpp"
#include "celab/error.hpp"

namespace celab {

namespace {

constexpr std::string_view kProblemFormat = "celab-problem/1";
constexpr std::string_view kReportFormat = "celab-report/1";

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ParseError, "field '" + path + "': " + what);
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string child(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

Complex parse_complex(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  field_error(path, "expected a number or an [re, im] pair");
}

ComplexMatrix parse_matrix(const Json& j, const std::string& path, Index expected) {
  if (!j.is_array() || j.empty()) field_error(path, "expected a nonempty array of rows");
  const auto rows = static_cast<Index>(j.size());
  Index cols = -1;
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].empty()) field_error(child(path, r), "expected a nonempty row");
    const auto c = static_cast<Index>(j[r].size());
    if (cols < 0) cols = c;
    if (c != cols) field_error(child(path, r), "ragged matrix rows");
  }
  if (rows != expected || cols != expected) {
    throw Error(ErrorCode::DimensionMismatch,
                "field '" + path + "': expected " + std::to_string(expected) + "x" +
                    std::to_string(expected) + ", got " + std::to_string(rows) + "x" +
                    std::to_string(cols));
  }
  ComplexMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const auto& cell = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      m(r, c) = parse_complex(cell, child(child(path, static_cast<std::size_t>(r)),
                                          static_cast<std::size_t>(c)));
    }
  }
  return m;
}

std::vector<ComplexMatrix> parse_matrix_list(const Json& j, const std::string& path, Index n) {
  if (!j.is_array() || j.empty()) field_error(path, "expected a nonempty list of matrices");
  std::vector<ComplexMatrix> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_matrix(j[i], child(path, i), n));
  return out;
}

void check_partition_shape(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) field_error(path, "expected a list of index blocks");
  for (std::size_t b = 0; b < j.size(); ++b) {
    if (!j[b].is_array()) field_error(child(path, b), "expected a list of 1-based indices");
    for (std::size_t i = 0; i < j[b].size(); ++i) {
      if (!j[b][i].is_number_integer()) {
        field_error(child(child(path, b), i), "expected an integer index");
      }
    }
  }
}

std::vector<std::vector<Index>> partition_blocks(const Json& j) {
  std::vector<std::vector<Index>> blocks;
  for (const auto& b : j) {
    auto& block = blocks.emplace_back();
    for (const auto& i : b) block.push_back(i.get<Index>());
  }
  return blocks;
}

std::uint64_t parse_seed(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned()) {
    field_error(path, "expected a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

void require_keys(const Json& obj, const std::string& path,
                  std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      field_error(child(path, key), "unknown key");
    }
  }
}

void validate_builder_params(const BuilderSpec& b, Index n) {
  const std::string path = "builder.params";
  const Json& p = b.params;
  if (b.kind == "pinch") {
    check_partition_shape(p, path);
  } else if (b.kind == "group") {
    parse_matrix_list(p, path, n);
  } else if (b.kind == "conjugated") {
    if (!p.is_object()) field_error(path, "expected {unitary, partition}");
    require_keys(p, path, {"unitary", "partition"});
    if (!p.contains("unitary")) field_error(child(path, "unitary"), "missing");
    if (!p.contains("partition")) field_error(child(path, "partition"), "missing");
    parse_matrix(p["unitary"], child(path, "unitary"), n);
    check_partition_shape(p["partition"], child(path, "partition"));
  } else if (b.kind == "cesaro") {
    if (!p.is_object()) field_error(path, "expected {kraus, max_iter?}");
    require_keys(p, path, {"kraus", "max_iter"});
    if (!p.contains("kraus")) field_error(child(path, "kraus"), "missing");
    parse_matrix_list(p["kraus"], child(path, "kraus"), n);
    if (p.contains("max_iter") && (!p["max_iter"].is_number_integer() || p["max_iter"].get<int>() < 1)) {
      field_error(child(path, "max_iter"), "expected a positive integer");
    }
  } else if (b.kind == "random") {
    if (!p.is_object() || !p.contains("kind") || !p["kind"].is_string()) {
      field_error(child(path, "kind"), "expected an instance kind name");
    }
    require_keys(p, path, {"kind"});
    try {
      instance_kind_from_string(p["kind"].get<std::string>());
    } catch (const Error& e) {
      field_error(child(path, "kind"), e.what());
    }
  } else {
    field_error("builder.kind", "unknown builder '" + b.kind + "'");
  }
}

Tolerances parse_tolerances(const Json& j) {
  if (!j.is_object()) field_error("tolerances", "expected an object");
  require_keys(j, "tolerances", {"eps_herm", "eps_psd", "eps_rank", "eps_residual"});
  Tolerances tol;
  auto read = [&](const char* key, double& slot) {
    if (!j.contains(key)) return;
    const auto& v = j[key];
    if (!v.is_number() || !(v.get<double>() > 0.0)) {
      field_error(child("tolerances", key), "expected a positive number");
    }
    slot = v.get<double>();
  };
  read("eps_herm", tol.eps_herm);
  read("eps_psd", tol.eps_psd);
  read("eps_rank", tol.eps_rank);
  read("eps_residual", tol.eps_residual);
  return tol;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  const auto end = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n'));
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      "cp",          "contractive",     "idempotent",     "range",
      "generated_algebra", "ideal",     "generator_containment", "kernel_equals_ideal",
      "bilateral",   "word_defect",     "kadison_schwarz", "ce_algebra",
      "wedderburn",  "quotient_iso",    "order_iso",      "unital_isometry"};
  return names;
}

ProblemFile problem_from_json(const Json& doc) {
  if (!doc.is_object()) field_error("", "document must be an object");
  if (doc.contains("format") && doc["format"] == kReportFormat) {
    if (!doc.contains("problem")) field_error("problem", "report has no embedded problem");
    return problem_from_json(doc["problem"]);
  }
  require_keys(doc, "", {"format", "comment", "n", "kraus", "choi", "builder", "tolerances",
                         "checks", "seed", "k_max"});
  if (doc.contains("format") && doc["format"] != kProblemFormat) {
    field_error("format", "unsupported format");
  }

  ProblemFile p;
  if (!doc.contains("n")) field_error("n", "missing");
  if (!doc["n"].is_number_integer() || doc["n"].get<long long>() < 1) {
    field_error("n", "expected a positive integer");
  }
  p.n = doc["n"].get<Index>();

  const int variants = static_cast<int>(doc.contains("kraus")) +
                       static_cast<int>(doc.contains("choi")) +
                       static_cast<int>(doc.contains("builder"));
  if (variants != 1) {
    throw Error(ErrorCode::AmbiguousMapSpec,
                "exactly one of kraus, choi, builder is required (found " +
                    std::to_string(variants) + ")");
  }
  if (doc.contains("kraus")) {
    p.map_spec = KrausSpec{parse_matrix_list(doc["kraus"], "kraus", p.n)};
  } else if (doc.contains("choi")) {
    p.map_spec = ChoiSpec{parse_matrix(doc["choi"], "choi", p.n * p.n)};
  } else {
    const Json& b = doc["builder"];
    if (!b.is_object()) field_error("builder", "expected {kind, params, seed?}");
    require_keys(b, "builder", {"kind", "params", "seed"});
    if (!b.contains("kind") || !b["kind"].is_string()) field_error("builder.kind", "expected a string");
    BuilderSpec spec;
    spec.kind = b["kind"].get<std::string>();
    spec.params = b.contains("params") ? b["params"] : Json::object();
    if (b.contains("seed")) spec.seed = parse_seed(b["seed"], "builder.seed");
    validate_builder_params(spec, p.n);
    p.map_spec = std::move(spec);
  }

  if (doc.contains("tolerances")) p.tolerances = parse_tolerances(doc["tolerances"]);
  if (doc.contains("seed")) p.seed = parse_seed(doc["seed"], "seed");
  if (doc.contains("k_max")) {
    const auto& k = doc["k_max"];
    if (!k.is_number_integer() || k.get<int>() < 1 || k.get<int>() > 8) {
      field_error("k_max", "expected an integer in 1..8");
    }
    p.k_max = k.get<int>();
  }
  if (doc.contains("checks")) {
    const auto& c = doc["checks"];
    if (!c.is_array()) field_error("checks", "expected a list of check names");
    const auto& known = check_names();
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!c[i].is_string()) field_error(child("checks", i), "expected a string");
      const auto name = c[i].get<std::string>();
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        field_error(child("checks", i), "unknown check '" + name + "'");
      }
      p.checks.push_back(name);
    }
  }
  return p;
}

ProblemFile parse_problem(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " +
                    e.what());
  }
  return problem_from_json(doc);
}

ProblemFile parse_problem(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_problem(std::string_view(text));
}

ProblemFile parse_problem_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  return parse_problem(in);
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const ProblemFile& p) {
  Json doc;
  doc["format"] = kProblemFormat;
  doc["n"] = p.n;
  if (const auto* k = std::get_if<KrausSpec>(&p.map_spec)) {
    Json list = Json::array();
    for (const auto& op : k->operators) list.push_back(matrix_to_json(op));
    doc["kraus"] = std::move(list);
  } else if (const auto* c = std::get_if<ChoiSpec>(&p.map_spec)) {
    doc["choi"] = matrix_to_json(c->choi);
  } else {
    const auto& b = std::get<BuilderSpec>(p.map_spec);
    doc["builder"] = {{"kind", b.kind}, {"params", b.params}, {"seed", b.seed}};
  }
  doc["tolerances"] = {{"eps_herm", p.tolerances.eps_herm},
                       {"eps_psd", p.tolerances.eps_psd},
                       {"eps_rank", p.tolerances.eps_rank},
                       {"eps_residual", p.tolerances.eps_residual}};
  doc["seed"] = p.seed;
  doc["k_max"] = p.k_max;
  if (!p.checks.empty()) doc["checks"] = p.checks;
  return doc;
}

CPMap materialize(const ProblemFile& p) {
  const Tolerances& tol = p.tolerances;
  if (const auto* k = std::get_if<KrausSpec>(&p.map_spec)) return CPMap::from_kraus(k->operators);
  if (const auto* c = std::get_if<ChoiSpec>(&p.map_spec)) return CPMap::from_choi(c->choi);

  const auto& b = std::get<BuilderSpec>(p.map_spec);
  const Json& params = b.params;
  if (b.kind == "pinch") {
    return pinching(Partition::from_one_based(p.n, partition_blocks(params)), tol);
  }
  if (b.kind == "group") {
    const auto unitaries = parse_matrix_list(params, "builder.params", p.n);
    return group_average(unitaries, tol);
  }
  if (b.kind == "conjugated") {
    const auto u = parse_matrix(params["unitary"], "builder.params.unitary", p.n);
    return conjugated_pinching(u, Partition::from_one_based(p.n, partition_blocks(params["partition"])),
                               tol);
  }
  if (b.kind == "cesaro") {
    auto kraus = parse_matrix_list(params["kraus"], "builder.params.kraus", p.n);
    const int max_iter = params.contains("max_iter") ? params["max_iter"].get<int>() : 64;
    return cesaro_projection(ChannelSpec::make(std::move(kraus), tol), tol, max_iter).map;
  }
  if (b.kind == "random") {
    return random_instance(p.n, instance_kind_from_string(params["kind"].get<std::string>()),
                           b.seed, tol);
  }
  field_error("builder.kind", "unknown builder '" + b.kind + "'");
}

}  // namespace celab
