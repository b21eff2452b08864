// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "celab/construct.hpp"
#include "celab/problem.hpp"

namespace celab {

enum class Verdict { pass, fail, skipped };

std::string_view to_string(Verdict v) noexcept;

/// One check of the pipeline. The verdict is `value <cmp> threshold` unless
/// the check was skipped or its stage threw; `details` holds the secondary
/// residuals and counts.
struct CheckRecord {
  std::string name;
  Verdict verdict = Verdict::skipped;
  double value = 0.0;
  double threshold = 0.0;
  std::string comparison = "<=";  // "<=" or ">="
  std::map<std::string, double> details;
  std::string message;
  double seconds = 0.0;
};

struct ReportDims {
  Index n = 0;
  Index dim_range = 0;
  Index dim_algebra = 0;
  Index dim_ideal = 0;
  Index dim_kernel = 0;
  std::vector<BlockDim> block_dims;
  std::vector<bool> in_J;
  std::optional<double> range_product_closure_residual;
};

struct PipelineSeeds {
  std::uint64_t base = 0;
  std::uint64_t word_defect = 0;
  std::uint64_t kadison_schwarz = 0;
  std::uint64_t wedderburn = 0;
  std::uint64_t order_iso = 0;
  std::uint64_t unital_isometry = 0;

  static PipelineSeeds from(std::uint64_t base);
};

struct CertificateReport {
  ProblemFile problem;  // as certified
  std::optional<ProjectionCertificate> certificate;
  ReportDims dims;
  PipelineSeeds seeds;
  std::vector<CheckRecord> checks;
  Index embedded_choi_dim = 0;  // n, or 0 when only a hash is embedded
  std::string choi_hash;        // FNV-1a over the Choi matrix entries

  const CheckRecord* find(const std::string& name) const;
  bool all_passed() const;  // every non-skipped check passed
  int exit_code() const { return all_passed() ? 0 : 1; }
};

/// Workload knobs for the randomized checks.
struct PipelineOptions {
  int word_lengths = 5;
  int words_per_length = 20;
  int kadison_schwarz_probes = 100;
  int order_iso_trials = 50;
  int isometry_samples = 20;
  double isometry_tolerance = 1e-6;
  std::vector<std::string> only;  // overrides ProblemFile::checks when nonempty
};

/// Runs every requested check in order. Hypothesis failures (cp, contractive,
/// idempotent) halt the pipeline; later failures are recorded and only their
/// dependents are skipped. Never throws for map or stage errors.
CertificateReport run_pipeline(const ProblemFile& problem, const PipelineOptions& opts = {});

/// Same, on an already materialized map.
CertificateReport run_pipeline(const ProblemFile& problem, const CPMap& map,
                               const PipelineOptions& opts = {});

/// The checks making up the proof of the kernel identity.
const std::vector<std::string>& proof_step_checks();

Json to_json(const CertificateReport& r);

/// Replaces the map description with the explicit Choi matrix when n <= 8.
ProblemFile explicit_problem(const ProblemFile& p, const CPMap& map);

std::string fnv1a_hash(const ComplexMatrix& m);

// Corpus generation.

struct CorpusOptions {
  int count = 100;
  int n_max = 4;
  std::uint64_t seed = 1;
  int k_max = 4;
  Tolerances tolerances;
  int threads = 0;          // 0: hardware concurrency, capped by CE_LAB_THREADS
  int search_cap = 200;     // total instances allowed for the content search
  PipelineOptions pipeline;
};

struct CorpusInstance {
  int index = 0;
  std::string kind;
  Index n = 0;
  std::uint64_t seed = 0;
  bool supplementary = false;  // added by the content search
  std::string build_error;
  std::optional<CertificateReport> report;

  bool passed() const;
};

struct CheckSummary {
  int pass = 0;
  int fail = 0;
  int skipped = 0;
  std::optional<double> worst;  // max for "<=" checks, min for ">=" checks
  std::string comparison = "<=";
  double threshold = 0.0;
};

struct CorpusSummary {
  CorpusOptions options;
  std::vector<CorpusInstance> instances;
  std::map<std::string, CheckSummary> checks;
  int passed_instances = 0;
  bool content_found = false;
  int content_instance = -1;
  double content_product_residual = 0.0;
  int threads_used = 1;

  int exit_code() const;
};

/// A cesaro instance whose range is not product-closed (closure residual above
/// 1e-4) while the CE-algebra, quotient and order checks pass.
bool demonstrates_content(const CorpusInstance& inst);

CorpusSummary run_corpus(const CorpusOptions& opts);

Json to_json(const CorpusSummary& s, bool include_instances = true);

int thread_budget(int requested, int work_items);

}  // namespace celab
