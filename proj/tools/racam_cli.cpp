// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "CLI11.hpp"
#include "racam/experiment.hpp"
#include "racam/report.hpp"

int main(int argc, char** argv) {
  racam::ExperimentParams params;
  std::string shape;
  std::string ablate;
  unsigned precision = 8;

  CLI::App app{"racam-sim: bit-serial DRAM PIM performance simulator"};
  app.set_version_flag("--version", racam::tool_version());
  auto* mode = app.add_option("--mode", params.mode, "gemm, gemv, llm or sweep")
      ->check(CLI::IsMember({"gemm", "gemv", "llm", "sweep"}));
  app.add_option("--config", params.config_path, "hardware INI (default: $RACAM_CONFIG, then --preset)");
  app.add_option("--preset", params.preset, "built-in hardware preset");
  app.add_option("--area-config", params.area_path, "area calibration INI");
  app.add_option("--shape", shape, "GEMM shape MxKxN");
  app.add_option("--precision", precision, "operand precision in bits")->check(CLI::Range(1u, 15u));
  app.add_option("--precisions", params.precisions, "precision sweep values")->delimiter(',');
  app.add_option("--sizes", params.sizes, "square size sweep values")->delimiter(',');
  app.add_option("--pe-counts", params.pe_counts, "PEs per bank sweep values")->delimiter(',');
  app.add_option("--model", params.model, "gpt3-6.7b, gpt3-175b, llama3-8b or llama3-70b");
  app.add_option("--scenario", params.scenario, "code_generation or context_understanding");
  app.add_option("--ablate", ablate, "comma list of units to disable: lb, pr, bu");
  auto* sweep = app.add_option("--sweep", params.sweep, "precision, pe_count, size, mapping, ablation or mul");
  app.add_option("--out", params.out_dir, "artifact directory");
  app.add_option("--threads", params.threads, "search threads (0 = hardware concurrency)");
  app.add_flag("--log-trace", params.log_trace, "run a small ISA program and dump its event trace");
  app.add_flag("--batched-heads", params.batched_heads, "map attention heads as one batched kernel");
  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->count() > 0 && mode->count() == 0) params.mode = "sweep";
    params.ablation = racam::Ablation::parse(ablate);
    params.shape.precision = precision;
    if (!shape.empty()) {
      params.shape = racam::parse_shape(shape, precision);
      params.shape_given = true;
    }
    return racam::run_experiment(params, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "racam-sim: " << e.what() << "\n";
    return 2;
  }
}
