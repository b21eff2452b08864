// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "celab/cli.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = celab::cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("celab_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }

  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

const char* kPinch = R"({"n": 3, "builder": {"kind": "pinch", "params": [[1, 2], [3]]}})";
const char* kTranspose = R"({"n": 2, "choi": [[1, 0, 0, 0.5], [0, 0, 0.5, 0],
                                              [0, 0.5, 0, 0], [0.5, 0, 0, 1]]})";

Json without_timings(Json doc) {
  for (auto& c : doc["checks"]) c.erase("seconds");
  return doc;
}

}  // namespace

TEST_CASE("certify exits 0 when every check passes") {
  TempDir dir;
  const auto r = cli({"certify", dir.write("pinch.json", kPinch)});
  CHECK(r.code == 0);
  const auto doc = Json::parse(r.out);
  CHECK(doc["format"] == "celab-report/1");
  CHECK(doc["exit_code"] == 0);
  CHECK(doc["dims"]["dim_R"] == 5);
  CHECK(r.err.find("pass") != std::string::npos);
}

TEST_CASE("certify exits 1 when a check fails") {
  TempDir dir;
  const auto r = cli({"certify", dir.write("t.json", kTranspose)});
  CHECK(r.code == 1);
  const auto doc = Json::parse(r.out);
  CHECK(doc["checks"][0]["name"] == "cp");
  CHECK(doc["checks"][0]["verdict"] == "fail");
}

TEST_CASE("usage and input errors exit 2") {
  TempDir dir;
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"certify"}).code == 2);
  CHECK(cli({"certify", dir.path("missing.json")}).code == 2);
  const auto bad = cli({"certify", dir.write("bad.json", "{\n\"n\": }")});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 2") != std::string::npos);
  CHECK(cli({"certify", dir.write("amb.json", R"({"n": 1, "kraus": [[[1]]], "choi": [[1]]})")}).code ==
        2);
  CHECK(cli({"build", "--kind", "pinch", "--n", "9", "--seed", "1", "-o", dir.path("x.json")}).code ==
        2);
  CHECK(cli({"corpus", "--count", "0"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("build writes a problem file that certifies") {
  TempDir dir;
  for (const char* kind : {"pinch", "group", "conjugated", "cesaro"}) {
    const auto file = dir.path(std::string(kind) + ".json");
    CHECK(cli({"build", "--kind", kind, "--n", "3", "--seed", "11", "-o", file}).code == 0);
    CHECK(cli({"certify", file, "--quiet"}).code == 0);
  }
  const auto explicit_file = dir.path("explicit.json");
  CHECK(cli({"build", "--kind", "cesaro", "--n", "3", "--seed", "11", "-o", explicit_file,
             "--explicit"})
            .code == 0);
  std::ifstream in(explicit_file);
  const auto doc = Json::parse(in);
  CHECK(doc.contains("choi"));
  const auto a = Json::parse(cli({"certify", explicit_file}).out);
  const auto b = Json::parse(cli({"certify", dir.path("cesaro.json")}).out);
  CHECK(a["choi_hash"] == b["choi_hash"]);
}

TEST_CASE("proof-steps runs the proof checks only") {
  TempDir dir;
  const auto r = cli({"proof-steps", dir.write("pinch.json", kPinch)});
  CHECK(r.code == 0);
  const auto doc = Json::parse(r.out);
  for (const auto& c : doc["checks"]) {
    if (c["name"] == "order_iso") CHECK(c["verdict"] == "skipped");
    if (c["name"] == "word_defect") CHECK(c["verdict"] == "pass");
  }
}

TEST_CASE("--json-out, --quiet and --tol") {
  TempDir dir;
  const auto in = dir.write("pinch.json", kPinch);
  const auto out = dir.path("report.json");
  const auto r = cli({"certify", in, "--json-out", out, "--quiet", "--tol", "1e-9", "--k-max", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(r.err.empty());
  std::ifstream f(out);
  const auto doc = Json::parse(f);
  CHECK(doc["tolerances"]["eps_residual"] == 1e-9);
  CHECK(doc["problem"]["k_max"] == 2);
  CHECK(cli({"certify", out, "--quiet"}).code == 0);
}

TEST_CASE("identical invocations produce identical reports") {
  TempDir dir;
  CHECK(cli({"build", "--kind", "cesaro", "--n", "4", "--seed", "2", "-o", dir.path("c.json")}).code ==
        0);
  const auto a = cli({"certify", dir.path("c.json")});
  const auto b = cli({"certify", dir.path("c.json")});
  CHECK(a.code == b.code);
  CHECK(without_timings(Json::parse(a.out)) == without_timings(Json::parse(b.out)));
}

TEST_CASE("corpus summarizes a run") {
  const auto r = cli({"corpus", "--count", "8", "--n-max", "3", "--seed", "4", "--threads", "1"});
  CHECK(r.code == 0);
  const auto doc = Json::parse(r.out);
  CHECK(doc["format"] == "celab-corpus/1");
  CHECK_FALSE(doc.contains("instances"));
  const auto with = cli({"corpus", "--count", "4", "--n-max", "3", "--instances", "--quiet"});
  CHECK(Json::parse(with.out).contains("instances"));
}
