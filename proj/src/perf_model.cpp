// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "racam/perf_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace racam {

namespace {

unsigned ceil_log2(uint64_t v) {
  unsigned b = 0;
  while ((uint64_t{1} << b) < v) ++b;
  return b;
}

void add_scaled(InstrCost& acc, const InstrCost& c, uint64_t times) {
  acc.array_row_reads += c.array_row_reads * times;
  acc.array_row_writes += c.array_row_writes * times;
  acc.lb_accesses += c.lb_accesses * times;
  acc.pe_steps += c.pe_steps * times;
  acc.pc_steps += c.pc_steps * times;
  acc.addp_steps += c.addp_steps * times;
  acc.latency_ns += c.latency_ns * static_cast<double>(times);
}

}  // namespace

std::string_view op_kind_name(OpKind k) {
  switch (k) {
    case OpKind::kMulReuse:
      return "mul_reuse";
    case OpKind::kMulBaseline:
      return "mul_baseline";
    case OpKind::kMulRed:
      return "mul_red";
    case OpKind::kAddSerial:
      return "add_serial";
    case OpKind::kPopcountReduce:
      return "popcount_reduce";
    case OpKind::kAddParallel:
      return "add_parallel";
  }
  return "unknown";
}

bool counts_match(const InstrCost& c, const EventTrace& t) {
  return c.array_row_reads == t.array_row_read() && c.array_row_writes == t.array_row_write() &&
         c.lb_accesses == t.lb_access() && c.pe_steps == t.pe_step() && c.pc_steps == t.pc_step() &&
         c.addp_steps == t.addp_step();
}

double cost_latency(const InstrCost& c, const TimingParams& t) {
  return static_cast<double>(c.array_row_accesses()) * t.array_access_ns() +
         static_cast<double>(c.lb_accesses) * t.t_lb_ns + static_cast<double>(c.pe_steps) * t.t_pe_ns +
         static_cast<double>(c.pc_steps) * t.t_pc_ns + static_cast<double>(c.addp_steps) * t.t_addp_ns;
}

InstrCost instr_cost(OpKind kind, unsigned n, const SystemConfig& cfg, int64_t segments) {
  if (n == 0) throw std::invalid_argument("precision must be >= 1");
  if (segments < 1) throw std::invalid_argument("segments must be >= 1");
  const uint64_t N = n;
  const auto seg = static_cast<uint64_t>(segments);
  const bool lb = cfg.periph.lb_enabled;
  const bool reuse = kind == OpKind::kMulReuse || (kind == OpKind::kMulRed && lb);
  if (reuse && 2 * N + 1 > static_cast<uint64_t>(cfg.periph.lb_rows))
    throw std::invalid_argument("locality buffer too small for " + std::to_string(n) + "-bit multiply");

  InstrCost c;
  switch (kind) {
    case OpKind::kMulReuse:
      c = {2 * N, 2 * N, N * N + 5 * N - 1, N * N + N - 1, 0, 0, 0};
      break;
    case OpKind::kMulBaseline:
      c = {N * N + N, 2 * N * N, 0, N * (N + 1), 0, 0, 0};
      break;
    case OpKind::kMulRed:
      if (lb)
        c = {2 * N, 1, N * N + 5 * N - 1, N * N + N - 1, 2 * N * seg, 0, 0};
      else
        c = {N * N + N, 2 * N * N + 1, 0, N * (N + 1), 2 * N * seg, 0, 0};
      break;
    case OpKind::kAddSerial:
      c = {2 * N, N + 1, lb ? 4 * N + 2 : 0, N + 1, 0, 0, 0};
      break;
    case OpKind::kPopcountReduce:
      c = {N, 0, 0, 0, N * seg, 0, 0};
      break;
    case OpKind::kAddParallel:
      c = {0, 0, 0, 0, 0, 1, 0};
      break;
  }
  c.latency_ns = cost_latency(c, cfg.timing);
  return c;
}

unsigned accumulator_bits(const TilePlan& p) {
  const auto k = static_cast<size_t>(Dim::kK);
  const auto ka = static_cast<uint64_t>(p.tiling.iterations[k] * p.tiling.chunk[k]);
  return std::min(32u, 2 * p.shape.precision + ceil_log2(ka));
}

ComputeSchedule compute_schedule(const TilePlan& p, const SystemConfig& cfg) {
  ComputeSchedule s;
  s.precision = p.shape.precision;
  s.lanes = p.lanes();
  s.segments = p.segments();
  const auto& ch = p.tiling.chunk;
  const auto& it = p.tiling.iterations;
  const auto k = static_cast<size_t>(Dim::kK);
  const auto blocks = static_cast<uint64_t>(p.blocks_used);
  const auto iters = static_cast<uint64_t>(p.temporal_iterations);

  uint64_t row_groups = 1;  // row-held index combinations per iteration, K excluded
  for (Dim d : kDims)
    if (p.mapping.bmap.in_rows(d) && d != Dim::kK) row_groups *= static_cast<uint64_t>(ch[static_cast<size_t>(d)]);

  if (p.column_reduction) {
    s.mul_red = blocks * iters * row_groups;
    add_scaled(s.total, instr_cost(OpKind::kMulRed, s.precision, cfg, s.segments), s.mul_red);
  } else {
    const auto pairs = row_groups * static_cast<uint64_t>(ch[k]);
    s.mul = s.add = blocks * iters * pairs;
    s.acc_bits = accumulator_bits(p);
    add_scaled(s.total, instr_cost(cfg.periph.lb_enabled ? OpKind::kMulReuse : OpKind::kMulBaseline, s.precision, cfg),
               s.mul);
    add_scaled(s.total, instr_cost(OpKind::kAddSerial, s.acc_bits, cfg), s.add);
  }
  if (p.levels[static_cast<size_t>(Level::kA)].dim == Dim::kK && blocks > 1) {
    uint64_t outputs = 1;
    for (Dim d : {Dim::kM, Dim::kN}) {
      const auto i = static_cast<size_t>(d);
      outputs *= static_cast<uint64_t>(it[i] * ch[i]);
    }
    s.add_parallel = (blocks - 1) * outputs;
    add_scaled(s.total, instr_cost(OpKind::kAddParallel, s.precision, cfg), s.add_parallel);
  }
  return s;
}

double tile_compute_latency(const TilePlan& plan, const SystemConfig& cfg) {
  return compute_schedule(plan, cfg).total.latency_ns;
}

double tile_io_latency(const IoPattern& io, const SystemConfig& cfg) {
  const double bw = cfg.timing.channel_bandwidth_bytes_per_s * static_cast<double>(std::max<int64_t>(1, io.active_channels));
  return io.total_bytes() / bw * 1e9 + static_cast<double>(io.phases) * (cfg.timing.t_rcd_ns + cfg.timing.t_rp_ns);
}

LatencyReport kernel_latency(const TilePlan& plan, const SystemConfig& cfg) {
  LatencyReport r;
  r.shape = plan.shape;
  r.mapping = to_literal(plan.mapping);
  const ComputeSchedule s = compute_schedule(plan, cfg);
  r.io = infer_io_pattern(plan, cfg);
  r.pim_latency_ns = s.total.latency_ns;
  r.io_latency_ns = tile_io_latency(r.io, cfg);
  r.total_ns = r.pim_latency_ns + r.io_latency_ns;
  r.histogram = {{"pim_mul_red", s.mul_red},
                 {"pim_mul", s.mul},
                 {"pim_add", s.add},
                 {"pim_add_parallel", s.add_parallel}};
  r.temporal_iterations = plan.temporal_iterations;
  r.active_banks = plan.active_banks();
  // Useful work: one full-precision MAC per lane per mul_red time.
  const double mac_ns = instr_cost(OpKind::kMulRed, plan.shape.precision, cfg).latency_ns;
  r.pe_utilization = static_cast<double>(plan.shape.macs()) * mac_ns /
                     (static_cast<double>(cfg.total_pes()) * r.pim_latency_ns);
  return r;
}

LatencyReport kernel_latency(const GemmShape& shape, const Mapping& mapping, const SystemConfig& cfg) {
  return kernel_latency(tile(shape, mapping, cfg), cfg);
}

Ablation Ablation::parse(std::string_view text) {
  Ablation a;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t comma = std::min(text.find(',', pos), text.size());
    const std::string_view item = text.substr(pos, comma - pos);
    if (item == "lb")
      a.no_lb = true;
    else if (item == "pr")
      a.no_pr = true;
    else if (item == "bu")
      a.no_bu = true;
    else if (!item.empty() && item != "none")
      throw std::invalid_argument("unknown ablation '" + std::string(item) + "' (expected lb, pr, bu)");
    pos = comma + 1;
  }
  return a;
}

std::string Ablation::name() const {
  std::string s;
  auto add = [&](bool on, const char* n) {
    if (!on) return;
    if (!s.empty()) s += ',';
    s += n;
  };
  add(no_lb, "lb");
  add(no_pr, "pr");
  add(no_bu, "bu");
  return s.empty() ? "none" : s;
}

SystemConfig ablate(const SystemConfig& cfg, const Ablation& a) {
  SystemConfig out = cfg;
  if (a.no_lb) out.periph.lb_enabled = false;
  if (a.no_pr) out.periph.pr_enabled = false;
  if (a.no_bu) out.periph.bu_enabled = false;
  return out;
}

}  // namespace racam
