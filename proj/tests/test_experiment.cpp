// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "racam/experiment.hpp"
#include "racam/report.hpp"

using namespace racam;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("racam_test_" + name);
  fs::remove_all(p);
  return p;
}

size_t lines(const std::string& s) { return static_cast<size_t>(std::count(s.begin(), s.end(), '\n')); }

ExperimentParams small_params(const std::string& dir) {
  ExperimentParams s;
  s.preset = "desk_small";
  s.out_dir = dir;
  s.shape = {8, 8, 8, 8};
  s.shape_given = true;
  return s;
}

}  // namespace

TEST_CASE("shape parsing") {
  CHECK(parse_shape("1024x12288x4096", 8) == GemmShape{1024, 12288, 4096, 8});
  CHECK(parse_shape("1X2X3", 4) == GemmShape{1, 2, 3, 4});
  for (const char* bad : {"8x8", "8x8x8x8", "axbxc", "8x8x8q", "", "0x4x4", "-1x4x4"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_shape(bad, 8), std::invalid_argument);
  }
}

TEST_CASE("parameter validation") {
  ExperimentParams s;
  CHECK_NOTHROW(validate_params(s));
  s.mode = "bogus";
  CHECK_THROWS_AS(validate_params(s), std::invalid_argument);
  s = {};
  s.mode = "gemv";
  s.shape = {4, 8, 8, 8};
  s.shape_given = true;
  CHECK_THROWS_AS(validate_params(s), std::invalid_argument);
  s = {};
  s.sweep = "precision";
  CHECK_THROWS_AS(validate_params(s), std::invalid_argument);
  s.mode = "sweep";
  CHECK_NOTHROW(validate_params(s));
  s.sweep = "colour";
  CHECK_THROWS_AS(validate_params(s), std::invalid_argument);
  s = {};
  s.mode = "sweep";
  s.sweep = "precision";
  s.precisions = {8, 16};
  CHECK_THROWS_AS(validate_params(s), std::invalid_argument);
  s = {};
  s.mode = "llm";
  s.model = "nope";
  CHECK_THROWS_AS(validate_params(s), std::invalid_argument);
  s.model = "llama3-8b";
  s.scenario = "nope";
  CHECK_THROWS_AS(validate_params(s), std::invalid_argument);
}

TEST_CASE("configuration resolution order") {
  const fs::path dir = scratch("resolve");
  fs::create_directories(dir);
  SystemConfig tweaked = preset("desk_small");
  tweaked.timing.t_pe_ns = 2.5;
  const fs::path file = dir / "x.ini";
  std::ofstream(file) << render(tweaked);

  ExperimentParams s;
  s.preset = "desk_small";
  ::unsetenv("RACAM_CONFIG");
  CHECK(resolve_config(s) == preset("desk_small"));
  ::setenv("RACAM_CONFIG", file.c_str(), 1);
  CHECK(resolve_config(s) == tweaked);
  s.config_path = (fs::path(RACAM_SOURCE_DIR) / "configs" / "racam_full.ini").string();
  CHECK(resolve_config(s) == preset("racam_full"));
  ::unsetenv("RACAM_CONFIG");
  s.ablation = Ablation::parse("lb");
  CHECK_FALSE(resolve_config(s).periph.lb_enabled);
  fs::remove_all(dir);
}

TEST_CASE("gemm run writes every artifact and is reproducible") {
  const fs::path a = scratch("gemm_a"), b = scratch("gemm_b");
  std::ostringstream log;
  ExperimentParams s = small_params(a.string());
  s.log_trace = true;
  REQUIRE(run_experiment(s, log) == 0);
  for (const char* f : {"config.ini", "report.json", "candidates.csv", "summary.txt", "trace.jsonl", "program.txt",
                        "program.pimtrace"}) {
    CAPTURE(f);
    CHECK(fs::exists(a / f));
  }
  CHECK(load_config(slurp(a / "config.ini")) == preset("desk_small"));

  const std::string csv = slurp(a / "candidates.csv");
  CHECK(csv.rfind(csv_preamble(preset("desk_small")), 0) == 0);
  CHECK(csv.find("config_hash=") != std::string::npos);
  CHECK(csv.find("version=" + tool_version()) != std::string::npos);
  CHECK(lines(csv) == 2 + 1458);

  const nlohmann::json rep = nlohmann::json::parse(slurp(a / "report.json"));
  CHECK(rep["mode"] == "gemm");
  CHECK(rep["trace"]["matches"] == true);
  CHECK(rep.contains("area"));

  s.out_dir = b.string();
  s.threads = 3;
  REQUIRE(run_experiment(s, log) == 0);
  CHECK(slurp(b / "candidates.csv") == csv);
  CHECK(slurp(b / "trace.jsonl") == slurp(a / "trace.jsonl"));
  CHECK(slurp(b / "program.pimtrace") == slurp(a / "program.pimtrace"));
  CHECK(log.str().find("wrote ") != std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("sweeps") {
  const fs::path d = scratch("sweep");
  std::ostringstream log;
  ExperimentParams s = small_params(d.string());
  s.mode = "sweep";

  s.sweep = "precision";
  REQUIRE(run_experiment(s, log) == 0);
  const std::string p = slurp(d / "sweep_precision.csv");
  CHECK(lines(p) == 2 + 3);
  CHECK(p.find("\nprecision,mapping,pim_ns,io_ns,total_ns,ratio_to_first\n") != std::string::npos);

  s.sweep = "ablation";
  REQUIRE(run_experiment(s, log) == 0);
  CHECK(lines(slurp(d / "sweep_ablation.csv")) == 2 + 6);

  s.sweep = "mul";
  REQUIRE(run_experiment(s, log) == 0);
  CHECK(slurp(d / "sweep_mul.csv").find("\n4,16,") != std::string::npos);

  s.sweep = "pe_count";
  s.pe_counts = {2, 4};
  REQUIRE(run_experiment(s, log) == 0);
  CHECK(lines(slurp(d / "sweep_pe_count.csv")) == 2 + 2);
  fs::remove_all(d);
}

TEST_CASE("llm run on a scaled system") {
  const fs::path d = scratch("llm");
  std::ostringstream log;
  ExperimentParams s;
  s.mode = "llm";
  s.preset = "racam_128th";
  s.model = "gpt3-6.7b";
  s.scenario = "context_understanding";
  s.out_dir = d.string();
  REQUIRE(run_experiment(s, log) == 0);
  const nlohmann::json rep = nlohmann::json::parse(slurp(d / "report.json"));
  CHECK(rep["workload"]["total_ns"].get<double>() > 0);
  CHECK(fs::exists(d / "kernels.csv"));
  fs::remove_all(d);
}
