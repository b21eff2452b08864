// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#include "celab/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "celab/builders.hpp"
#include "celab/error.hpp"
#include "celab/pipeline.hpp"
#include "celab/problem.hpp"

namespace celab {

namespace {

constexpr int kExitUsage = 2;

struct CommonFlags {
  std::optional<double> tol;
  std::optional<int> k_max;
  std::string json_out;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--tol", f.tol, "Sets eps_herm, eps_psd and eps_residual")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--k-max", f.k_max, "Largest matrix level for the order check")
      ->check(CLI::Range(1, 8));
  cmd->add_option("--json-out", f.json_out, "Write the JSON document here instead of stdout");
  cmd->add_flag("--quiet", f.quiet, "No summary on stderr");
}

void apply_common(const CommonFlags& f, Tolerances& tol, int& k_max) {
  if (f.tol) tol.eps_herm = tol.eps_psd = tol.eps_residual = *f.tol;
  if (f.k_max) k_max = *f.k_max;
}

void emit_json(const Json& doc, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << doc.dump(2) << "\n";
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::PreconditionFailed, "cannot write '" + path + "'");
  file << doc.dump(2) << "\n";
}

std::string format_value(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << std::scientific << v;
  return s.str();
}

void print_report_summary(const CertificateReport& r, std::ostream& err) {
  err << "n = " << r.dims.n << ", dim R = " << r.dims.dim_range << ", dim A0 = " << r.dims.dim_algebra
      << ", dim J = " << r.dims.dim_ideal << "\n";
  for (const auto& c : r.checks) {
    err << "  " << std::left << std::setw(22) << c.name << std::setw(8) << to_string(c.verdict);
    if (c.verdict != Verdict::skipped) {
      err << format_value(c.value) << " " << c.comparison << " " << format_value(c.threshold);
    }
    if (!c.message.empty() && c.verdict != Verdict::pass) err << "  (" << c.message << ")";
    err << "\n";
  }
  err << (r.all_passed() ? "result: pass" : "result: fail") << "\n";
}

int run_certify(const std::string& path, const CommonFlags& flags, bool proof_steps,
                std::ostream& out, std::ostream& err) {
  ProblemFile p = parse_problem_file(path);
  apply_common(flags, p.tolerances, p.k_max);
  p.tolerances.validate();
  PipelineOptions opts;
  if (proof_steps) opts.only = proof_step_checks();
  const CertificateReport report = run_pipeline(p, opts);
  emit_json(to_json(report), flags.json_out, out);
  if (!flags.quiet) print_report_summary(report, err);
  return report.exit_code();
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certify conditional-expectation structure of completely positive projections"};
  app.require_subcommand(1);

  CommonFlags certify_flags, proof_flags, build_flags, corpus_flags;
  std::string certify_file, proof_file;

  auto* certify = app.add_subcommand("certify", "Run the full certification pipeline on a problem file");
  certify->add_option("file", certify_file, "Problem file or report")->required();
  add_common(certify, certify_flags);

  auto* proof = app.add_subcommand("proof-steps", "Run only the kernel-identity proof steps");
  proof->add_option("file", proof_file, "Problem file or report")->required();
  add_common(proof, proof_flags);

  std::string build_kind;
  int build_n = 0;
  std::uint64_t build_seed = 0;
  std::string build_out;
  bool build_explicit = false;
  auto* build = app.add_subcommand("build", "Write a problem file for a random instance");
  build->add_option("--kind", build_kind, "pinch | group | conjugated | cesaro")
      ->required()
      ->check(CLI::IsMember({"pinch", "group", "conjugated", "cesaro"}));
  build->add_option("--n", build_n, "Matrix size")->required()->check(CLI::Range(2, 8));
  build->add_option("--seed", build_seed, "Instance seed")->required();
  build->add_option("-o,--output", build_out, "Output path")->required();
  build->add_flag("--explicit", build_explicit, "Embed the Choi matrix instead of the builder");
  add_common(build, build_flags);

  CorpusOptions corpus_opts;
  bool corpus_instances = false;
  auto* corpus = app.add_subcommand("corpus", "Generate and certify a random corpus");
  corpus->add_option("--count", corpus_opts.count, "Number of instances")->check(CLI::PositiveNumber);
  corpus->add_option("--n-max", corpus_opts.n_max, "Largest matrix size")->check(CLI::Range(2, 8));
  corpus->add_option("--seed", corpus_opts.seed, "Corpus seed");
  corpus->add_option("--threads", corpus_opts.threads, "Worker threads (0: automatic)")
      ->check(CLI::NonNegativeNumber);
  corpus->add_flag("--instances", corpus_instances, "Include per-instance entries in the summary");
  add_common(corpus, corpus_flags);

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("celab");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (certify->parsed()) return run_certify(certify_file, certify_flags, false, out, err);
    if (proof->parsed()) return run_certify(proof_file, proof_flags, true, out, err);

    if (build->parsed()) {
      ProblemFile p;
      p.n = build_n;
      p.map_spec = BuilderSpec{"random", Json{{"kind", build_kind}}, build_seed};
      p.seed = build_seed;
      apply_common(build_flags, p.tolerances, p.k_max);
      p.tolerances.validate();
      if (build_explicit) p = explicit_problem(p, materialize(p));
      std::ofstream file(build_out, std::ios::binary);
      if (!file) throw Error(ErrorCode::PreconditionFailed, "cannot write '" + build_out + "'");
      file << to_json(p).dump(2) << "\n";
      if (!build_flags.quiet) err << "wrote " << build_out << "\n";
      return 0;
    }

    if (corpus->parsed()) {
      apply_common(corpus_flags, corpus_opts.tolerances, corpus_opts.k_max);
      const CorpusSummary summary = run_corpus(corpus_opts);
      emit_json(to_json(summary, corpus_instances), corpus_flags.json_out, out);
      if (!corpus_flags.quiet) {
        err << "instances: " << summary.passed_instances << "/" << summary.instances.size()
            << " passed (" << summary.threads_used << " threads)\n";
        for (const auto& name : check_names()) {
          const auto& c = summary.checks.at(name);
          err << "  " << std::left << std::setw(22) << name << c.pass << " pass, " << c.fail
              << " fail, " << c.skipped << " skipped";
          if (c.worst) err << ", worst " << format_value(*c.worst);
          err << "\n";
        }
        err << "content demonstration: "
            << (summary.content_found ? "instance " + std::to_string(summary.content_instance)
                                      : std::string("not found"))
            << "\n";
      }
      return summary.exit_code();
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace celab
