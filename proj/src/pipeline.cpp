// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#include "celab/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <set>
#include <thread>

#include "celab/builders.hpp"
#include "celab/error.hpp"
#include "celab/random.hpp"

namespace celab {

namespace {

constexpr std::string_view kReportFormat = "celab-report/1";
constexpr std::string_view kSummaryFormat = "celab-corpus/1";
constexpr double kContentThreshold = 1e-4;

const std::map<std::string, std::vector<std::string>>& dependencies() {
  static const std::map<std::string, std::vector<std::string>> deps = {
      {"cp", {}},
      {"contractive", {}},
      {"idempotent", {}},
      {"range", {}},
      {"generated_algebra", {"range"}},
      {"ideal", {"generated_algebra"}},
      {"generator_containment", {"ideal"}},
      {"kernel_equals_ideal", {"ideal"}},
      {"bilateral", {"ideal"}},
      {"word_defect", {"ideal"}},
      {"kadison_schwarz", {}},
      {"ce_algebra", {"generated_algebra"}},
      {"wedderburn", {"generated_algebra"}},
      {"quotient_iso", {"ideal", "wedderburn"}},
      {"order_iso", {"quotient_iso"}},
      {"unital_isometry", {"quotient_iso"}},
  };
  return deps;
}

std::set<std::string> needed_stages(const std::vector<std::string>& requested) {
  std::set<std::string> out;
  std::vector<std::string> stack(requested.begin(), requested.end());
  while (!stack.empty()) {
    const auto name = stack.back();
    stack.pop_back();
    if (!out.insert(name).second) continue;
    for (const auto& d : dependencies().at(name)) stack.push_back(d);
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ComplexMatrix normalized(const ComplexMatrix& m) {
  const double norm = operator_norm(m);
  return norm > 0.0 ? ComplexMatrix(m / norm) : m;
}

Json dims_to_json(const ReportDims& d) {
  Json blocks = Json::array();
  for (const auto& b : d.block_dims) blocks.push_back({{"size", b.size}, {"multiplicity", b.multiplicity}});
  Json in_j = Json::array();
  for (bool f : d.in_J) in_j.push_back(f);
  Json out = {{"n", d.n},
              {"dim_R", d.dim_range},
              {"dim_A0", d.dim_algebra},
              {"dim_J", d.dim_ideal},
              {"dim_kernel", d.dim_kernel},
              {"block_dims", blocks},
              {"in_J", in_j}};
  out["range_product_closure_residual"] =
      d.range_product_closure_residual ? Json(*d.range_product_closure_residual) : Json(nullptr);
  return out;
}

Json certificate_to_json(const ProjectionCertificate& c) {
  return {{"cp", c.cp},
          {"choi_min_eig", c.choi_min_eig},
          {"contractive_decided", c.contractive_decided},
          {"contractive", c.contractive},
          {"norm_of_unit_image", c.norm_of_unit_image},
          {"idempotent", c.idempotent},
          {"idem_residual", c.idem_residual},
          {"unital", c.unital},
          {"unit_residual", c.unit_residual},
          {"star_preserving", c.star_preserving},
          {"star_residual", c.star_residual}};
}

Json check_to_json(const CheckRecord& c) {
  Json details = Json::object();
  for (const auto& [k, v] : c.details) details[k] = v;
  Json out = {{"name", c.name},
              {"verdict", std::string(to_string(c.verdict))},
              {"value", c.value},
              {"comparison", c.comparison},
              {"threshold", c.threshold},
              {"details", details},
              {"message", c.message},
              {"seconds", c.seconds}};
  return out;
}

}  // namespace

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::skipped: return "skipped";
  }
  return "?";
}

PipelineSeeds PipelineSeeds::from(std::uint64_t base) {
  return {base,
          derive_seed(base, 0x11),
          derive_seed(base, 0x12),
          derive_seed(base, 0x13),
          derive_seed(base, 0x14),
          derive_seed(base, 0x15)};
}

const CheckRecord* CertificateReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool CertificateReport::all_passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckRecord& c) { return c.verdict == Verdict::fail; });
}

const std::vector<std::string>& proof_step_checks() {
  static const std::vector<std::string> names = {"cp",    "contractive",          "idempotent",
                                                 "range", "generated_algebra",    "ideal",
                                                 "generator_containment", "kernel_equals_ideal",
                                                 "bilateral", "word_defect"};
  return names;
}

std::string fnv1a_hash(const ComplexMatrix& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](double x) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &x, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  };
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      mix(m(r, c).real());
      mix(m(r, c).imag());
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ProblemFile explicit_problem(const ProblemFile& p, const CPMap& map) {
  ProblemFile out = p;
  if (map.ambient_dim() <= 8) out.map_spec = ChoiSpec{map.choi()};
  return out;
}

CertificateReport run_pipeline(const ProblemFile& problem, const PipelineOptions& opts) {
  try {
    const CPMap map = materialize(problem);
    return run_pipeline(problem, map, opts);
  } catch (const std::exception& e) {
    CertificateReport report;
    report.problem = problem;
    report.seeds = PipelineSeeds::from(problem.seed);
    report.dims.n = problem.n;
    for (const auto& name : check_names()) {
      CheckRecord rec;
      rec.name = name;
      if (name == "cp") {
        rec.verdict = Verdict::fail;
        rec.message = std::string("map construction failed: ") + e.what();
      } else {
        rec.message = "skipped: map construction failed";
      }
      report.checks.push_back(std::move(rec));
    }
    return report;
  }
}

CertificateReport run_pipeline(const ProblemFile& problem, const CPMap& map,
                               const PipelineOptions& opts) {
  const Tolerances& tol = problem.tolerances;
  CertificateReport report;
  report.problem = explicit_problem(problem, map);
  report.seeds = PipelineSeeds::from(problem.seed);
  report.dims.n = map.ambient_dim();
  report.choi_hash = fnv1a_hash(map.choi());
  report.embedded_choi_dim = map.ambient_dim() <= 8 ? map.ambient_dim() : 0;

  std::vector<std::string> requested =
      !opts.only.empty() ? opts.only : (!problem.checks.empty() ? problem.checks : check_names());
  for (const char* h : {"cp", "contractive", "idempotent"}) requested.emplace_back(h);
  const std::set<std::string> wanted(requested.begin(), requested.end());
  const std::set<std::string> needed = needed_stages(requested);

  std::map<std::string, bool> available;  // stage produced its data
  bool halted = false;

  auto run = [&](const std::string& name, const std::function<void(CheckRecord&)>& body) {
    CheckRecord rec;
    rec.name = name;
    if (!needed.count(name)) {
      rec.message = "not requested";
      report.checks.push_back(std::move(rec));
      return;
    }
    if (halted) {
      rec.message = "skipped: a map hypothesis failed";
      report.checks.push_back(std::move(rec));
      return;
    }
    for (const auto& d : dependencies().at(name)) {
      if (!available[d]) {
        rec.message = "skipped: depends on " + d;
        report.checks.push_back(std::move(rec));
        return;
      }
    }
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(rec);
      available[name] = true;
    } catch (const std::exception& e) {
      rec.verdict = Verdict::fail;
      rec.message = e.what();
    }
    rec.seconds = seconds_since(t0);
    if (!wanted.count(name) && rec.verdict != Verdict::skipped) {
      rec.verdict = Verdict::skipped;
      rec.message = "not requested (computed as a dependency)";
    }
    report.checks.push_back(std::move(rec));
  };

  auto set_le = [](CheckRecord& rec, double value, double threshold) {
    rec.value = value;
    rec.threshold = threshold;
    rec.comparison = "<=";
    rec.verdict = value <= threshold ? Verdict::pass : Verdict::fail;
  };
  auto set_ge = [](CheckRecord& rec, double value, double threshold) {
    rec.value = value;
    rec.threshold = threshold;
    rec.comparison = ">=";
    rec.verdict = value >= threshold ? Verdict::pass : Verdict::fail;
  };

  // Hypotheses.
  const auto t_cert = std::chrono::steady_clock::now();
  const ProjectionCertificate cert = certify_projection(map, tol);
  const double cert_seconds = seconds_since(t_cert);
  report.certificate = cert;
  {
    CheckRecord rec;
    rec.name = "cp";
    set_ge(rec, cert.choi_min_eig, -tol.eps_psd);
    const double herm = operator_norm(map.choi() - map.choi().adjoint());
    rec.details["choi_hermiticity_residual"] = herm;
    rec.details["hermiticity_threshold"] = tol.eps_herm;
    if (!cert.cp) rec.verdict = Verdict::fail;
    rec.seconds = cert_seconds;
    report.checks.push_back(std::move(rec));
  }
  {
    CheckRecord rec;
    rec.name = "contractive";
    rec.details["norm_of_unit_image"] = cert.norm_of_unit_image;
    if (!cert.contractive_decided) {
      rec.value = cert.norm_of_unit_image;
      rec.threshold = 1.0 + tol.eps_residual;
      rec.message = "undetermined: contractivity is only decided for completely positive maps";
    } else {
      set_le(rec, cert.norm_of_unit_image, 1.0 + tol.eps_residual);
    }
    report.checks.push_back(std::move(rec));
  }
  {
    CheckRecord rec;
    rec.name = "idempotent";
    set_le(rec, cert.idem_residual, tol.eps_residual);
    report.checks.push_back(std::move(rec));
  }
  halted = !cert.is_projection();

  const PipelineSeeds& seeds = report.seeds;
  const Index n = map.ambient_dim();
  const CPMap certified_map = map.with_certificate(cert);

  std::optional<OperatorSubspace> range;
  std::optional<AlgebraContext> ctx;
  std::optional<IdealCertificate> ideal;
  std::optional<WedderburnDecomposition> wedderburn_split;
  std::optional<QuotientIso> iso;

  run("range", [&](CheckRecord& rec) {
    range = range_of(certified_map, tol);
    double drift = 0.0;
    for (const auto& b : range->basis()) drift = std::max(drift, hs_norm(certified_map(b) - b));
    set_le(rec, drift, tol.eps_residual);
    rec.details["dim"] = static_cast<double>(range->dim());
    report.dims.dim_range = range->dim();
  });

  run("generated_algebra", [&](CheckRecord& rec) {
    int rounds = 0;
    OperatorSubspace algebra = generated_algebra(*range, tol, 0, &rounds);
    ctx = AlgebraContext{n, *range, algebra, certified_map, cert, rounds,
                         algebra_closure_residual(algebra, tol)};
    double range_inside = 0.0;
    for (const auto& r : range->basis())
      range_inside = std::max(range_inside, contains(algebra, r, tol).residual);
    double image_inside = 0.0;
    for (const auto& a : algebra.basis())
      image_inside = std::max(image_inside, contains(*range, certified_map(a), tol).residual);
    set_le(rec, std::max({ctx->closure_residual, range_inside, image_inside}), tol.eps_residual);
    rec.details["dim"] = static_cast<double>(algebra.dim());
    rec.details["rounds"] = rounds;
    rec.details["closure_residual"] = ctx->closure_residual;
    rec.details["range_containment_residual"] = range_inside;
    rec.details["image_containment_residual"] = image_inside;
    report.dims.dim_algebra = algebra.dim();
    report.dims.range_product_closure_residual = range_product_closure_residual(*range, tol);
  });

  run("ideal", [&](CheckRecord& rec) {
    ideal = ideal_J(*ctx, tol);
    set_le(rec, ideal->right_closure_residual, tol.eps_residual);
    rec.details["dim"] = static_cast<double>(ideal->ideal.dim());
    rec.details["rounds"] = ideal->rounds;
    rec.details["generator_count"] = ideal->generator_count;
    report.dims.dim_ideal = ideal->ideal.dim();
  });

  run("generator_containment", [&](CheckRecord& rec) {
    set_le(rec, ideal->generator_kernel_residual, tol.eps_residual);
    rec.details["generator_count"] = ideal->generator_count;
  });

  run("kernel_equals_ideal", [&](CheckRecord& rec) {
    const auto kernel = kernel_subspace(*ctx, tol);
    const auto cmp = subspace_equal(ideal->ideal, kernel, tol);
    set_le(rec, cmp.gap, tol.eps_residual);
    rec.details["dim_kernel"] = static_cast<double>(kernel.dim());
    rec.details["dim_J"] = static_cast<double>(ideal->ideal.dim());
    report.dims.dim_kernel = kernel.dim();
  });

  run("bilateral", [&](CheckRecord& rec) {
    const auto b = verify_bilateral(*ctx, *ideal, tol);
    set_le(rec, b.left_residual, tol.eps_residual);
  });

  run("word_defect", [&](CheckRecord& rec) {
    Rng rng(seeds.word_defect);
    double worst = 0.0;
    for (int len = 1; len <= opts.word_lengths; ++len) {
      double worst_len = 0.0;
      for (int w = 0; w < opts.words_per_length; ++w) {
        std::vector<ComplexMatrix> word;
        for (int i = 0; i < len; ++i) word.push_back(random_real_combination(rng, ctx->range));
        worst_len = std::max(worst_len, word_defect(*ctx, *ideal, word, tol).residual);
      }
      rec.details["length_" + std::to_string(len)] = worst_len;
      worst = std::max(worst, worst_len);
    }
    set_le(rec, worst, tol.eps_residual);
    rec.details["words"] = opts.word_lengths * opts.words_per_length;
  });

  run("kadison_schwarz", [&](CheckRecord& rec) {
    Rng rng(seeds.kadison_schwarz);
    double worst = std::numeric_limits<double>::infinity();
    for (int p = 0; p < opts.kadison_schwarz_probes; ++p) {
      const ComplexMatrix g = normalized(gaussian_matrix(rng, n, n));
      const ComplexMatrix y = normalized(gaussian_matrix(rng, n, n));
      const ComplexMatrix z = g.adjoint() * g;
      worst = std::min(worst, kadison_schwarz_check(certified_map, z, y, tol).min_eig);
    }
    set_ge(rec, worst, -tol.eps_psd);
    rec.details["probes"] = opts.kadison_schwarz_probes;
  });

  run("ce_algebra", [&](CheckRecord& rec) {
    const auto ce = build_ce_algebra(*ctx, tol);
    set_le(rec,
           std::max({ce.associativity_residual, ce.unit_residual, ce.star_residual,
                     ce.closure_residual}),
           tol.eps_residual);
    rec.details["associativity_residual"] = ce.associativity_residual;
    rec.details["unit_residual"] = ce.unit_residual;
    rec.details["star_residual"] = ce.star_residual;
    rec.details["closure_residual"] = ce.closure_residual;
  });

  run("wedderburn", [&](CheckRecord& rec) {
    wedderburn_split = wedderburn(ctx->algebra, tol, seeds.wedderburn);
    set_le(rec, wedderburn_split->projection_residual, tol.eps_residual);
    rec.details["center_dim"] = static_cast<double>(wedderburn_split->center_dim);
    rec.details["blocks"] = static_cast<double>(wedderburn_split->block_dims.size());
    rec.details["attempts"] = wedderburn_split->attempts;
    report.dims.block_dims = wedderburn_split->block_dims;
  });

  run("quotient_iso", [&](CheckRecord& rec) {
    iso = quotient_iso(*ctx, *ideal, *wedderburn_split, tol);
    Index block_sum = 0;
    for (std::size_t i = 0; i < iso->wedderburn.block_dims.size(); ++i) {
      if (!iso->wedderburn.in_J[i]) {
        const Index s = iso->wedderburn.block_dims[i].size;
        block_sum += s * s;
      }
    }
    set_le(rec,
           std::max({iso->intertwining_residual, iso->roundtrip_residual,
                     iso->compression_residual}),
           tol.eps_residual);
    rec.details["intertwining_residual"] = iso->intertwining_residual;
    rec.details["roundtrip_residual"] = iso->roundtrip_residual;
    rec.details["compression_residual"] = iso->compression_residual;
    rec.details["dim_B"] = static_cast<double>(iso->quotient.dim());
    rec.details["sum_block_sizes_squared"] = static_cast<double>(block_sum);
    rec.details["dim_R"] = static_cast<double>(ctx->range.dim());
    if (block_sum != ctx->range.dim()) {
      rec.verdict = Verdict::fail;
      rec.message = "dimension bookkeeping failed";
    }
    report.dims.in_J = iso->wedderburn.in_J;
  });

  run("order_iso", [&](CheckRecord& rec) {
    const auto r = order_iso_check(*iso, problem.k_max, opts.order_iso_trials, seeds.order_iso, tol);
    set_ge(rec, r.worst_min_eig(), -tol.eps_psd);
    int failures = 0;
    for (const auto& level : r.levels) {
      const std::string k = "k" + std::to_string(level.k);
      rec.details[k + "_forward_min_eig"] = level.forward_min_eig;
      rec.details[k + "_backward_min_eig"] = level.backward_min_eig;
      failures += level.shift_failures;
    }
    rec.details["trials_per_level"] = opts.order_iso_trials;
    rec.details["shift_failures"] = failures;
    if (failures > 0) {
      rec.verdict = Verdict::fail;
      rec.message = "some Hermitian draws never became positive under the unit shift";
    }
  });

  run("unital_isometry", [&](CheckRecord& rec) {
    const auto r = unital_isometry_check(*iso, opts.isometry_samples, seeds.unital_isometry);
    set_le(rec, r.max_relative_deviation, opts.isometry_tolerance);
    rec.details["min_ratio"] = r.min_ratio;
    rec.details["max_ratio"] = r.max_ratio;
    rec.details["samples"] = r.samples;
    if (!cert.unital) {
      rec.verdict = Verdict::skipped;
      rec.message = "map is not unital: ratio recorded, not gated";
    }
  });

  return report;
}

Json to_json(const CertificateReport& r) {
  Json doc;
  doc["format"] = kReportFormat;
  doc["reproducibility"] =
      "verdicts are bit-stable for identical inputs, seeds and tolerances; residuals are "
      "stable to 1e-12 on one platform";
  Json problem = to_json(r.problem);
  if (r.embedded_choi_dim == 0) {
    problem.erase("choi");
    problem.erase("kraus");
  }
  doc["problem"] = std::move(problem);
  doc["choi_hash"] = r.choi_hash;
  const auto& t = r.problem.tolerances;
  doc["tolerances"] = {{"eps_herm", t.eps_herm},
                       {"eps_psd", t.eps_psd},
                       {"eps_rank", t.eps_rank},
                       {"eps_residual", t.eps_residual}};
  doc["seeds"] = {{"base", r.seeds.base},
                  {"word_defect", r.seeds.word_defect},
                  {"kadison_schwarz", r.seeds.kadison_schwarz},
                  {"wedderburn", r.seeds.wedderburn},
                  {"order_iso", r.seeds.order_iso},
                  {"unital_isometry", r.seeds.unital_isometry}};
  doc["certificate"] = r.certificate ? certificate_to_json(*r.certificate) : Json(nullptr);
  doc["dims"] = dims_to_json(r.dims);
  Json checks = Json::array();
  int pass = 0, fail = 0, skipped = 0;
  for (const auto& c : r.checks) {
    checks.push_back(check_to_json(c));
    (c.verdict == Verdict::pass ? pass : c.verdict == Verdict::fail ? fail : skipped)++;
  }
  doc["checks"] = std::move(checks);
  doc["summary"] = {{"pass", pass}, {"fail", fail}, {"skipped", skipped}};
  doc["exit_code"] = r.exit_code();
  return doc;
}

bool CorpusInstance::passed() const { return build_error.empty() && report && report->all_passed(); }

bool demonstrates_content(const CorpusInstance& inst) {
  if (inst.kind != "cesaro" || !inst.report) return false;
  const auto& r = *inst.report;
  if (!r.dims.range_product_closure_residual ||
      *r.dims.range_product_closure_residual <= kContentThreshold) {
    return false;
  }
  for (const char* name : {"ce_algebra", "quotient_iso", "order_iso"}) {
    const auto* c = r.find(name);
    if (c == nullptr || c->verdict != Verdict::pass) return false;
  }
  return true;
}

int CorpusSummary::exit_code() const {
  for (const auto& inst : instances)
    if (!inst.passed()) return 1;
  return 0;
}

int thread_budget(int requested, int work_items) {
  int threads = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CE_LAB_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) threads = std::min(threads, static_cast<int>(cap));
  }
  return std::max(1, std::min(threads, std::max(1, work_items)));
}

namespace {

CorpusInstance make_instance(const CorpusOptions& opts, int index, InstanceKind kind,
                             bool supplementary) {
  const auto salt = static_cast<std::uint64_t>(index);
  CorpusInstance inst;
  inst.index = index;
  inst.kind = std::string(to_string(kind));
  inst.n = 2 + static_cast<Index>(derive_seed(opts.seed, 2 * salt) %
                                  static_cast<std::uint64_t>(opts.n_max - 1));
  inst.seed = derive_seed(opts.seed, 2 * salt + 1);
  inst.supplementary = supplementary;
  return inst;
}

void certify_instance(CorpusInstance& inst, const CorpusOptions& opts) {
  ProblemFile p;
  p.n = inst.n;
  p.map_spec = BuilderSpec{"random", Json{{"kind", inst.kind}}, inst.seed};
  p.tolerances = opts.tolerances;
  p.seed = inst.seed;
  p.k_max = opts.k_max;
  try {
    const CPMap map = materialize(p);
    inst.report = run_pipeline(p, map, opts.pipeline);
  } catch (const std::exception& e) {
    inst.build_error = e.what();
  }
}

void certify_all(std::vector<CorpusInstance>& batch, const CorpusOptions& opts, int threads) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < batch.size(); i = next++) certify_instance(batch[i], opts);
  };
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace

CorpusSummary run_corpus(const CorpusOptions& opts) {
  if (opts.count < 1) throw Error(ErrorCode::PreconditionFailed, "corpus count must be positive");
  if (opts.n_max < 2 || opts.n_max > 8) {
    throw Error(ErrorCode::PreconditionFailed, "n-max must be in 2..8");
  }
  opts.tolerances.validate();
  constexpr InstanceKind kinds[] = {InstanceKind::pinch, InstanceKind::group,
                                    InstanceKind::conjugated, InstanceKind::cesaro};

  CorpusSummary summary;
  summary.options = opts;
  summary.threads_used = thread_budget(opts.threads, opts.count);

  std::vector<CorpusInstance> batch;
  for (int i = 0; i < opts.count; ++i) batch.push_back(make_instance(opts, i, kinds[i % 4], false));
  certify_all(batch, opts, summary.threads_used);
  summary.instances = std::move(batch);

  auto find_content = [&] {
    for (const auto& inst : summary.instances) {
      if (demonstrates_content(inst)) {
        summary.content_found = true;
        summary.content_instance = inst.index;
        summary.content_product_residual = *inst.report->dims.range_product_closure_residual;
        return true;
      }
    }
    return false;
  };

  int next_index = opts.count;
  while (!find_content() && next_index < opts.search_cap) {
    std::vector<CorpusInstance> extra;
    const int room = std::min(summary.threads_used, opts.search_cap - next_index);
    for (int j = 0; j < room; ++j) {
      extra.push_back(make_instance(opts, next_index++, InstanceKind::cesaro, true));
    }
    certify_all(extra, opts, summary.threads_used);
    for (auto& e : extra) summary.instances.push_back(std::move(e));
  }

  for (const auto& name : check_names()) summary.checks[name];
  for (const auto& inst : summary.instances) {
    if (inst.passed()) ++summary.passed_instances;
    if (!inst.report) continue;
    for (const auto& c : inst.report->checks) {
      auto& s = summary.checks[c.name];
      if (c.verdict == Verdict::skipped) {
        ++s.skipped;
        continue;
      }
      (c.verdict == Verdict::pass ? s.pass : s.fail)++;
      s.comparison = c.comparison;
      s.threshold = c.threshold;
      if (!s.worst) {
        s.worst = c.value;
      } else {
        s.worst = c.comparison == ">=" ? std::min(*s.worst, c.value) : std::max(*s.worst, c.value);
      }
    }
  }
  return summary;
}

Json to_json(const CorpusSummary& s, bool include_instances) {
  Json doc;
  doc["format"] = kSummaryFormat;
  doc["options"] = {{"count", s.options.count},
                    {"n_max", s.options.n_max},
                    {"seed", s.options.seed},
                    {"k_max", s.options.k_max},
                    {"search_cap", s.options.search_cap},
                    {"tolerances",
                     {{"eps_herm", s.options.tolerances.eps_herm},
                      {"eps_psd", s.options.tolerances.eps_psd},
                      {"eps_rank", s.options.tolerances.eps_rank},
                      {"eps_residual", s.options.tolerances.eps_residual}}}};
  doc["instances_total"] = s.instances.size();
  doc["instances_passed"] = s.passed_instances;
  Json checks = Json::object();
  for (const auto& name : check_names()) {
    const auto it = s.checks.find(name);
    if (it == s.checks.end()) continue;
    const auto& c = it->second;
    checks[name] = {{"pass", c.pass},
                    {"fail", c.fail},
                    {"skipped", c.skipped},
                    {"comparison", c.comparison},
                    {"threshold", c.threshold},
                    {"worst", c.worst ? Json(*c.worst) : Json(nullptr)}};
  }
  doc["checks"] = std::move(checks);
  doc["content_demonstration"] = {
      {"found", s.content_found},
      {"instance", s.content_instance},
      {"range_product_closure_residual", s.content_product_residual},
      {"threshold", kContentThreshold},
      {"supplementary_instances",
       std::count_if(s.instances.begin(), s.instances.end(),
                     [](const CorpusInstance& i) { return i.supplementary; })}};
  if (include_instances) {
    Json list = Json::array();
    for (const auto& inst : s.instances) {
      Json entry = {{"index", inst.index},
                    {"kind", inst.kind},
                    {"n", inst.n},
                    {"seed", inst.seed},
                    {"supplementary", inst.supplementary},
                    {"verdict", inst.passed() ? "pass" : "fail"}};
      if (!inst.build_error.empty()) entry["build_error"] = inst.build_error;
      if (inst.report) {
        entry["dims"] = dims_to_json(inst.report->dims);
        Json failed = Json::array();
        for (const auto& c : inst.report->checks)
          if (c.verdict == Verdict::fail) failed.push_back(c.name);
        entry["failed_checks"] = std::move(failed);
        const auto* gap = inst.report->find("kernel_equals_ideal");
        entry["kernel_gap"] = gap && gap->verdict != Verdict::skipped ? Json(gap->value) : Json(nullptr);
      }
      list.push_back(std::move(entry));
    }
    doc["instances"] = std::move(list);
  }
  doc["exit_code"] = s.exit_code();
  return doc;
}

}  // namespace celab
