// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Functional execution of a mapped GEMM: every bank and block of the plan runs
// its padded instruction stream on a BitSerialEngine, and the host merges the
// partial outputs. Used to check mappings against a plain integer product and
// the closed-form schedule against real engine traces.

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "racam/arch_config.hpp"
#include "racam/bitserial_engine.hpp"
#include "racam/mapping.hpp"

namespace racam {

struct PlanExecution {
  std::vector<uint64_t> c;  // m x n, row-major
  EventTrace bank0_trace;
  std::map<std::string, uint64_t> bank0_histogram;
  uint64_t max_bank_instructions = 0;
  int64_t banks_with_work = 0;
  uint64_t add_parallel_wraps = 0;
};

/// `a` is m x k and `b` is k x n, row-major, unsigned values below
/// 2^precision.
PlanExecution execute_plan(const TilePlan& plan, const SystemConfig& cfg, std::span<const uint64_t> a,
                           std::span<const uint64_t> b);

/// Plain triple-loop product.
std::vector<uint64_t> reference_gemm(const GemmShape& s, std::span<const uint64_t> a, std::span<const uint64_t> b);

}  // namespace racam
