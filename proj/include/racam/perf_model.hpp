// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Closed-form compute and I/O latency. Every instruction cost here reproduces
// the counters that BitSerialEngine records for the same operation.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "racam/arch_config.hpp"
#include "racam/bitserial_engine.hpp"
#include "racam/mapping.hpp"

namespace racam {

enum class OpKind : uint8_t {
  kMulReuse,
  kMulBaseline,
  kMulRed,
  kAddSerial,
  kPopcountReduce,
  kAddParallel,
};
std::string_view op_kind_name(OpKind k);

struct InstrCost {
  uint64_t array_row_reads = 0;
  uint64_t array_row_writes = 0;
  uint64_t lb_accesses = 0;
  uint64_t pe_steps = 0;
  uint64_t pc_steps = 0;
  uint64_t addp_steps = 0;
  double latency_ns = 0;

  uint64_t array_row_accesses() const { return array_row_reads + array_row_writes; }
  bool operator==(const InstrCost&) const = default;
};

/// Counter-for-counter agreement with an engine trace (broadcast words aside).
bool counts_match(const InstrCost& c, const EventTrace& t);

/// Cost of one instruction at precision `n`. mul_red and popcount_reduce
/// take the popcount segment count; kMulRed follows cfg.periph.lb_enabled.
/// Throws std::invalid_argument when the buffer cannot hold an n-bit reuse
/// multiply.
InstrCost instr_cost(OpKind kind, unsigned n, const SystemConfig& cfg, int64_t segments = 1);

double cost_latency(const InstrCost& c, const TimingParams& t);

/// Per-bank instruction stream of a mapped GEMM. Every bank runs the same
/// stream (smaller tiles are padded), so this is also the critical path.
struct ComputeSchedule {
  uint64_t mul_red = 0;
  uint64_t mul = 0;
  uint64_t add = 0;
  uint64_t add_parallel = 0;
  unsigned precision = 8;
  unsigned acc_bits = 0;  // accumulator width of the in-row add chain
  int64_t segments = 1;
  int64_t lanes = 1;

  InstrCost total;  // summed counters and latency
};

/// Width of the in-row accumulator when K is held by block rows: wide enough
/// for every product the block adds up, capped at 32 bits.
unsigned accumulator_bits(const TilePlan& plan);

ComputeSchedule compute_schedule(const TilePlan& plan, const SystemConfig& cfg);
double tile_compute_latency(const TilePlan& plan, const SystemConfig& cfg);
double tile_io_latency(const IoPattern& io, const SystemConfig& cfg);

struct LatencyReport {
  GemmShape shape;
  std::string mapping;
  double pim_latency_ns = 0;
  double io_latency_ns = 0;
  double total_ns = 0;
  double pe_utilization = 0;
  std::map<std::string, uint64_t> histogram;  // per-bank instruction counts
  IoPattern io;
  int64_t temporal_iterations = 1;
  int64_t active_banks = 1;
};

LatencyReport kernel_latency(const GemmShape& shape, const Mapping& mapping, const SystemConfig& cfg);
LatencyReport kernel_latency(const TilePlan& plan, const SystemConfig& cfg);

struct Ablation {
  bool no_lb = false;
  bool no_pr = false;
  bool no_bu = false;

  /// Parses a comma list of lb, pr, bu ("" or "none" disables nothing).
  static Ablation parse(std::string_view text);
  std::string name() const;
};

/// Copy of `cfg` with the selected units switched off.
SystemConfig ablate(const SystemConfig& cfg, const Ablation& a);

}  // namespace racam
