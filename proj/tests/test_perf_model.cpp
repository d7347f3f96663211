// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <vector>

#include "doctest.h"
#include "racam/bitserial_engine.hpp"
#include "racam/perf_model.hpp"

using namespace racam;

namespace {

BitMatrix random_matrix(std::mt19937_64& rng, size_t lanes, unsigned n) {
  std::vector<uint64_t> v(lanes);
  for (auto& x : v) x = rng() & ((uint64_t{1} << n) - 1);
  return transpose_to_vertical(v, n);
}

EventTrace engine_trace(OpKind k, unsigned n, const SystemConfig& cfg, size_t segments, std::mt19937_64& rng) {
  EngineOptions o = EngineOptions::from_config(cfg);
  o.lb_cols = 64;
  BitSerialEngine e(o);
  const BitMatrix a = random_matrix(rng, 64, n), b = random_matrix(rng, 64, n);
  switch (k) {
    case OpKind::kMulReuse:
      return e.mul_reuse(a, b, n).trace;
    case OpKind::kMulBaseline:
      return e.mul_baseline(a, b, n).trace;
    case OpKind::kMulRed:
      return e.mul_red(a, b, n, segments).trace;
    case OpKind::kAddSerial:
      return e.add_serial(a, b, n).trace;
    case OpKind::kPopcountReduce:
      return e.popcount_reduce(a, segments).trace;
    case OpKind::kAddParallel:
      return e.add_parallel(3, 4).trace;
  }
  return {};
}

}  // namespace

TEST_CASE("closed-form counters equal engine traces") {
  std::mt19937_64 rng(2);
  for (bool lb : {true, false}) {
    SystemConfig cfg = preset("desk_small");
    cfg.periph.lb_enabled = lb;
    for (unsigned n = 1; n <= 8; ++n)
      for (OpKind k : {OpKind::kMulReuse, OpKind::kMulBaseline, OpKind::kMulRed, OpKind::kAddSerial,
                       OpKind::kPopcountReduce, OpKind::kAddParallel})
        for (size_t seg : {1u, 2u, 4u, 8u}) {
          CAPTURE(lb);
          CAPTURE(n);
          CAPTURE(op_kind_name(k));
          CAPTURE(seg);
          const InstrCost c = instr_cost(k, n, cfg, static_cast<int64_t>(seg));
          REQUIRE(counts_match(c, engine_trace(k, n, cfg, seg, rng)));
          REQUIRE(c.latency_ns == doctest::Approx(cost_latency(c, cfg.timing)).epsilon(1e-12));
        }
  }
}

TEST_CASE("documented cost examples") {
  const SystemConfig cfg = preset("racam_full");
  CHECK(instr_cost(OpKind::kMulReuse, 4, cfg).array_row_accesses() == 16);
  CHECK(instr_cost(OpKind::kMulBaseline, 8, cfg).latency_ns / instr_cost(OpKind::kMulReuse, 8, cfg).latency_ns >= 4);
  CHECK(instr_cost(OpKind::kAddParallel, 8, cfg).latency_ns == cfg.timing.t_addp_ns);
  CHECK(instr_cost(OpKind::kAddParallel, 2, cfg, 1).latency_ns == instr_cost(OpKind::kAddParallel, 8, cfg, 64).latency_ns);

  const InstrCost c{10, 6, 7, 3, 2, 1, 0};
  const TimingParams& t = cfg.timing;
  CHECK(cost_latency(c, t) == doctest::Approx(16 * (t.t_rcd_ns + t.t_rp_ns) * (1 - t.salp_overlap) + 7 * t.t_lb_ns +
                                              3 * t.t_pe_ns + 2 * t.t_pc_ns + 1 * t.t_addp_ns));

  SystemConfig small = cfg;
  small.periph.lb_rows = 9;
  CHECK_THROWS_AS(instr_cost(OpKind::kMulReuse, 8, small), std::invalid_argument);
  CHECK_NOTHROW(instr_cost(OpKind::kMulBaseline, 8, small));
}

TEST_CASE("single-instruction plan and linearity") {
  const SystemConfig cfg = preset("racam_full");
  const char* m = "H{N:CRDBA};B{R:MN,C:K}";
  const LatencyReport one = kernel_latency({1, 1024, 1, 8}, parse_mapping(m), cfg);
  CHECK(one.pim_latency_ns == instr_cost(OpKind::kMulRed, 8, cfg).latency_ns);
  CHECK(one.histogram.at("pim_mul_red") == 1);
  CHECK(one.total_ns == one.pim_latency_ns + one.io_latency_ns);

  const LatencyReport half = kernel_latency({1, 512, 1, 8}, parse_mapping(m), cfg);
  CHECK(half.pim_latency_ns == one.pim_latency_ns);

  const LatencyReport two = kernel_latency({1, 2048, 1, 8}, parse_mapping(m), cfg);
  CHECK(two.temporal_iterations == 2);
  CHECK(two.pim_latency_ns == 2 * one.pim_latency_ns);
}

TEST_CASE("cross-block partials use the parallel adder") {
  const SystemConfig cfg = preset("desk_small");
  const TilePlan p = tile({4, 64, 4, 8}, parse_mapping("H{M:CR,N:DB,K:A};B{R:MN,C:K}"), cfg);
  const ComputeSchedule s = compute_schedule(p, cfg);
  CHECK(p.blocks_used == 4);
  CHECK(s.add_parallel == 3 * 1 * 1);
  CHECK(s.mul_red == 4 * p.temporal_iterations * 1);
}

TEST_CASE("io latency terms") {
  SystemConfig cfg = preset("racam_full");
  IoPattern io;
  io.collect_bytes = 7.68e4;
  io.phases = 1;
  io.active_channels = 1;
  CHECK(tile_io_latency(io, cfg) == doctest::Approx(1000.0 + 32.0));
  io.active_channels = 8;
  CHECK(tile_io_latency(io, cfg) == doctest::Approx(125.0 + 32.0));

  const GemmShape s{1024, 12288, 12288, 8};
  const Mapping m = parse_mapping("H{M:CR,N:DBA};B{R:MN,C:K}");
  const LatencyReport base = kernel_latency(s, m, cfg);
  const LatencyReport no_pr = kernel_latency(s, m, ablate(cfg, Ablation::parse("pr")));
  const LatencyReport no_bu = kernel_latency(s, m, ablate(cfg, Ablation::parse("bu")));
  CHECK(no_pr.io_latency_ns > base.io_latency_ns);
  CHECK(no_pr.pim_latency_ns == base.pim_latency_ns);
  CHECK(no_pr.io.host_reduction_bytes > 0);
  CHECK(base.io.host_reduction_bytes == 0);
  CHECK(no_bu.io_latency_ns > base.io_latency_ns);
  CHECK(no_bu.pim_latency_ns == base.pim_latency_ns);
}

TEST_CASE("latency is non-decreasing in each dimension with the mapping fixed") {
  const SystemConfig cfg = preset("desk_small");
  std::mt19937_64 rng(31);
  const auto maps = enumerate_mappings({8, 8, 8, 8});
  for (int t = 0; t < 400; ++t) {
    const Mapping& m = maps[rng() % maps.size()];
    GemmShape s{static_cast<int64_t>(1 + rng() % 40), static_cast<int64_t>(1 + rng() % 40),
                static_cast<int64_t>(1 + rng() % 40), 8};
    if (s.m == 1) s.m = 2;
    const double base = kernel_latency(s, m, cfg).total_ns;
    for (Dim d : kDims) {
      GemmShape g = s;
      (d == Dim::kM ? g.m : d == Dim::kK ? g.k : g.n) += static_cast<int64_t>(1 + rng() % 5);
      CAPTURE(to_literal(m));
      CAPTURE(dim_letter(d));
      REQUIRE(kernel_latency(g, m, cfg).total_ns >= base * (1 - 1e-12));
    }
  }
}

TEST_CASE("disabling a unit never lowers a kernel's latency") {
  // A 1-bit multiply gains nothing from buffer staging, so the buffer
  // comparison starts at 2 bits.
  const SystemConfig cfg = preset("desk_small");
  for (unsigned prec : {2u, 4u, 8u})
    for (const GemmShape base : {GemmShape{8, 8, 8, prec}, GemmShape{3, 40, 5, prec}, GemmShape{1, 17, 9, prec}}) {
      for (const Mapping& m : enumerate_mappings(base)) {
        const double full = kernel_latency(base, m, cfg).total_ns;
        for (const char* a : {"lb", "pr", "bu", "lb,pr", "pr,bu", "lb,pr,bu"}) {
          CAPTURE(to_literal(m));
          CAPTURE(a);
          REQUIRE(kernel_latency(base, m, ablate(cfg, Ablation::parse(a))).total_ns >= full);
        }
      }
    }
}

TEST_CASE("ablation flags") {
  const SystemConfig cfg = preset("racam_full");
  CHECK(ablate(cfg, Ablation::parse("")) == cfg);
  CHECK(ablate(cfg, Ablation::parse("none")) == cfg);
  const SystemConfig all = ablate(cfg, Ablation::parse("lb,pr,bu"));
  CHECK_FALSE(all.periph.lb_enabled);
  CHECK_FALSE(all.periph.pr_enabled);
  CHECK_FALSE(all.periph.bu_enabled);
  CHECK(Ablation::parse("bu,lb").name() == "lb,bu");
  CHECK_THROWS_AS(Ablation::parse("xx"), std::invalid_argument);
}

TEST_CASE("precision scaling on a reduction-heavy kernel") {
  const SystemConfig cfg = preset("racam_full");
  const char* m = "H{M:CR,N:DBA};B{R:MN,C:K}";
  const double l8 = kernel_latency({1024, 12288, 12288, 8}, parse_mapping(m), cfg).pim_latency_ns;
  const double l4 = kernel_latency({1024, 12288, 12288, 4}, parse_mapping(m), cfg).pim_latency_ns;
  const double l2 = kernel_latency({1024, 12288, 12288, 2}, parse_mapping(m), cfg).pim_latency_ns;
  CHECK(l8 / l4 >= 1.7);
  CHECK(l8 / l4 <= 2.3);
  CHECK(l4 / l2 >= 1.7);
  CHECK(l4 / l2 <= 2.3);
}

TEST_CASE("utilization stays in range") {
  const SystemConfig cfg = preset("desk_small");
  for (const Mapping& m : enumerate_mappings({8, 8, 8, 8})) {
    const LatencyReport r = kernel_latency({8, 8, 8, 8}, m, cfg);
    REQUIRE(r.pe_utilization > 0);
    REQUIRE(r.pe_utilization <= 1.0 + 1e-12);
  }
  const SystemConfig full = preset("racam_full");
  const LatencyReport gemv =
      kernel_latency({1, 2048, 2048, 8}, parse_mapping("H{N:CRDBA};B{R:MN,C:K}"), full);
  CHECK(gemv.pe_utilization < 0.2);
}
