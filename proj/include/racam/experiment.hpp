// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Experiment orchestration behind the racam-sim command line.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "racam/arch_config.hpp"
#include "racam/mapping.hpp"
#include "racam/perf_model.hpp"

namespace racam {

struct ExperimentParams {
  std::string mode = "gemm";  // gemm | gemv | llm | sweep
  std::string config_path;    // empty: preset
  std::string preset = "racam_full";
  std::string area_path;      // empty: shipped calibration
  GemmShape shape{1024, 12288, 12288, 8};
  bool shape_given = false;
  std::string model = "gpt3-175b";
  std::string scenario = "code_generation";
  std::vector<unsigned> precisions{8, 4, 2};
  std::vector<int64_t> sizes{2048, 4096, 8192, 16384, 32768};
  std::vector<int64_t> pe_counts{128, 256, 512, 1024};
  Ablation ablation;
  std::string sweep;  // precision | pe_count | size | mapping | ablation | mul
  std::string out_dir = "racam_out";
  bool log_trace = false;
  bool batched_heads = false;
  unsigned threads = 1;
};

/// Parses "MxKxN".
GemmShape parse_shape(const std::string& text, unsigned precision);

/// Throws std::invalid_argument when parameters do not fit the mode.
void validate_params(const ExperimentParams& params);

/// Resolves the hardware description: params.config_path, else $RACAM_CONFIG,
/// else the named preset; then applies the ablation.
SystemConfig resolve_config(const ExperimentParams& params);

/// Runs the experiment, writes artifacts under params.out_dir and a human
/// summary to `log`. Returns the process exit status.
int run_experiment(const ExperimentParams& params, std::ostream& log);

}  // namespace racam
