// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <random>
#include <vector>

#include "doctest.h"
#include "racam/pim_isa.hpp"

using namespace racam;

namespace {

PimInstruction random_instruction(std::mt19937_64& rng) {
  static const Opcode ops[] = {Opcode::kBroadcastEnable, Opcode::kBroadcastDisable, Opcode::kPimEnable,
                               Opcode::kPimDisable,      Opcode::kAdd,              Opcode::kMul,
                               Opcode::kMulRed,          Opcode::kAddParallel};
  PimInstruction in;
  in.opcode = ops[rng() % 8];
  if (in.opcode == Opcode::kBroadcastEnable) {
    in.bank_bc = rng() & 1;
    in.col_bc = rng() & 1;
  }
  if (has_row_operands(in.opcode)) {
    in.r_dst = static_cast<uint16_t>(rng());
    in.r_src1 = static_cast<uint16_t>(rng());
    in.r_src2 = static_cast<uint16_t>(rng());
  }
  if (has_precision(in.opcode)) in.prec = static_cast<uint8_t>(1 + rng() % 15);
  return in;
}

uint64_t opcode_bits(const PimInstruction& in, unsigned width) { return encode(in, width).at(0) & 0x3F; }

}  // namespace

TEST_CASE("opcodes match the command table") {
  CHECK(opcode_bits(PimInstruction::enable(), 16) == 0b000010);
  CHECK(opcode_bits(PimInstruction::disable(), 16) == 0b000011);
  CHECK(opcode_bits(PimInstruction::bc_enable(true, false), 16) == 0b000000);
  CHECK(opcode_bits(PimInstruction::bc_disable(), 16) == 0b000001);
  CHECK(opcode_bits(PimInstruction::arith(Opcode::kAdd, 0, 1, 2, 4), 16) == 0b010000);
  CHECK(opcode_bits(PimInstruction::arith(Opcode::kMul, 0, 1, 2, 4), 16) == 0b010001);
  CHECK(opcode_bits(PimInstruction::arith(Opcode::kMulRed, 0, 1, 2, 4), 16) == 0b010010);
  CHECK(opcode_bits(PimInstruction::arith(Opcode::kAddParallel, 0, 1, 2, 0), 16) == 0b010011);
  CHECK(encode(PimInstruction::enable(), 16).size() == 1);
  CHECK(encode(PimInstruction::disable(), 8).size() == 1);
}

TEST_CASE("decoding known words") {
  const std::vector<uint64_t> w{0b000011};
  const Decoded d = decode(w, 16);
  CHECK(d.instr == PimInstruction::disable());
  CHECK(d.words == 1);

  const PimInstruction mr = PimInstruction::arith(Opcode::kMulRed, 100, 7, 42, 8);
  const auto words = encode(mr, 16);
  CHECK(words.size() > 1);
  const Decoded m = decode(words, 16);
  CHECK(m.instr.opcode == Opcode::kMulRed);
  CHECK(m.instr.prec == 8);
  CHECK(m.instr == mr);

  CHECK_THROWS_AS(decode(std::vector<uint64_t>{0b111111}, 16), IsaError);
  const std::vector<uint64_t> truncated(words.begin(), words.end() - 1);
  CHECK_THROWS_AS(decode(truncated, 16), IsaError);
  CHECK_THROWS_AS(decode(std::vector<uint64_t>{}, 16), IsaError);
}

TEST_CASE("encode and decode are inverse over random programs") {
  std::mt19937_64 rng(21);
  for (unsigned width : {6u, 8u, 16u, 32u, 64u}) {
    CAPTURE(width);
    for (int t = 0; t < 300; ++t) {
      const PimInstruction in = random_instruction(rng);
      const auto words = encode(in, width);
      for (uint64_t w : words)
        if (width < 64) REQUIRE(w < (uint64_t{1} << width));
      const Decoded d = decode(words, width);
      REQUIRE(d.instr == in);
      REQUIRE(d.words == words.size());
    }
    std::vector<PimInstruction> prog(50);
    for (auto& p : prog) p = random_instruction(rng);
    CHECK(decode_program(encode_program(prog, width), width) == prog);
  }
  CHECK_THROWS_AS(encode(PimInstruction::enable(), 5), IsaError);
}

TEST_CASE("invalid instructions are rejected") {
  CHECK_THROWS_AS(encode(PimInstruction::arith(Opcode::kMul, 0, 1, 2, 0), 16), IsaError);
  CHECK_THROWS_AS(validate_instruction(PimInstruction::arith(Opcode::kMul, 0, 1, 2, 9), 8), IsaError);
  CHECK_NOTHROW(validate_instruction(PimInstruction::arith(Opcode::kMul, 0, 1, 2, 8), 8));
  CHECK_FALSE(opcode_from_bits(0b111111).has_value());
  CHECK(opcode_from_bits(0b010010) == Opcode::kMulRed);
}

TEST_CASE("disassembly round trip") {
  std::mt19937_64 rng(4);
  std::vector<PimInstruction> prog(40);
  for (auto& p : prog) p = random_instruction(rng);
  const std::string text = disassemble_program(prog);
  CHECK(parse_program(text) == prog);
  CHECK(parse_program("# comment\n\npim_enable\n  pim_mul dst=3 src1=0 src2=1 prec=4\n") ==
        std::vector<PimInstruction>{PimInstruction::enable(), PimInstruction::arith(Opcode::kMul, 3, 0, 1, 4)});
  CHECK(disassemble(PimInstruction::arith(Opcode::kMul, 3, 0, 1, 4)) == "pim_mul dst=3 src1=0 src2=1 prec=4");
  CHECK_THROWS_AS(parse_instruction("pim_frobnicate"), IsaError);
  CHECK_THROWS_AS(parse_instruction("pim_mul dst=3 src1=0"), IsaError);
}

TEST_CASE("trace file round trip and corruption") {
  std::mt19937_64 rng(6);
  std::vector<PimInstruction> prog(20);
  for (auto& p : prog) p = random_instruction(rng);
  const TraceFile f{0x0123456789ABCDEFull, 16, encode_program(prog, 16)};
  const std::string bytes = serialize_trace(f);
  CHECK(bytes.substr(0, 8) == "RACAMPIM");
  CHECK(bytes.size() == 8 + 4 + 8 + 4 + 8 + 8 * f.words.size());
  CHECK(deserialize_trace(bytes) == f);

  const auto path = std::filesystem::temp_directory_path() / "racam_test_trace.pimtrace";
  write_trace_file(path.string(), f);
  CHECK(read_trace_file(path.string()) == f);
  std::filesystem::remove(path);

  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(deserialize_trace(bad), IsaError);
  CHECK_THROWS_AS(deserialize_trace(bytes.substr(0, bytes.size() - 3)), IsaError);
}

TEST_CASE("program over known operands") {
  const SystemConfig cfg = preset("desk_small");
  BankState bank(32, 4, 2);
  const std::vector<uint64_t> a{3, 7, 15, 0}, b{5, 9, 15, 11};
  bank.store_vertical(0, a, 4);
  bank.store_vertical(4, b, 4);
  const std::vector<PimInstruction> prog{PimInstruction::enable(), PimInstruction::arith(Opcode::kMul, 8, 0, 4, 4),
                                         PimInstruction::arith(Opcode::kAdd, 16, 0, 4, 4),
                                         PimInstruction::disable()};
  const ExecutionResult r = execute_program(prog, bank, cfg);
  CHECK(r.executed == 4);
  CHECK(bank.load_vertical(8, 4, 8) == std::vector<uint64_t>{15, 63, 225, 0});
  CHECK(bank.load_vertical(16, 4, 5) == std::vector<uint64_t>{8, 16, 30, 11});
  CHECK_FALSE(bank.mode().pim_mode);
}

TEST_CASE("dot products accumulated across two blocks") {
  const SystemConfig cfg = preset("desk_small");
  BankState bank(40, 4, 2);
  const std::vector<uint64_t> a{1, 2, 3, 4}, b{5, 6, 7, 8}, c{9, 10, 11, 12}, d{13, 14, 15, 1};
  bank.store_vertical(0, a, 4);
  bank.store_vertical(4, b, 4);
  bank.store_vertical(8, c, 4);
  bank.store_vertical(12, d, 4);
  const std::vector<PimInstruction> prog{
      PimInstruction::enable(), PimInstruction::arith(Opcode::kMulRed, 20, 0, 4, 4),
      PimInstruction::arith(Opcode::kMulRed, 30, 8, 12, 4), PimInstruction::arith(Opcode::kAddParallel, 20, 20, 30, 0),
      PimInstruction::disable()};
  execute_program(prog, bank, cfg);
  CHECK(bank.load_horizontal(20) == (5 + 12 + 21 + 32) + (117 + 140 + 165 + 12));
}

TEST_CASE("mode and broadcast errors") {
  SystemConfig cfg = preset("desk_small");
  BankState bank(16, 4);
  CHECK_THROWS_AS(execute_program(std::vector<PimInstruction>{PimInstruction::arith(Opcode::kAdd, 8, 0, 4, 4)}, bank,
                                  cfg),
                  ModeError);
  bank.mode().pim_mode = true;
  CHECK_THROWS_AS(bank.load_vertical(0, 4, 4), ModeError);
  bank.mode().pim_mode = false;

  execute_program(std::vector<PimInstruction>{PimInstruction::bc_enable(true, true)}, bank, cfg);
  CHECK(bank.mode().broadcast == BroadcastMode::kBoth);
  execute_program(std::vector<PimInstruction>{PimInstruction::bc_disable()}, bank, cfg);
  CHECK(bank.mode().broadcast == BroadcastMode::kOff);

  cfg.periph.bu_enabled = false;
  CHECK_THROWS_AS(execute_program(std::vector<PimInstruction>{PimInstruction::bc_enable(true, false)}, bank, cfg),
                  BroadcastDisabled);

  SystemConfig big = preset("desk_small");
  big.max_precision = 15;
  BankState b2(64, 4);
  b2.mode().pim_mode = true;
  CHECK_THROWS_AS(execute_program(std::vector<PimInstruction>{PimInstruction::arith(Opcode::kMul, 40, 0, 12, 12)}, b2,
                                  big),
                  BufferTooSmall);
}

TEST_CASE("trace equals the sum of engine traces and ignores logging") {
  const SystemConfig cfg = preset("desk_small");
  std::mt19937_64 rng(17);
  std::vector<uint64_t> a(4), b(4);
  for (size_t i = 0; i < 4; ++i) a[i] = rng() & 0xFF, b[i] = rng() & 0xFF;
  const std::vector<PimInstruction> prog{PimInstruction::enable(), PimInstruction::arith(Opcode::kMul, 16, 0, 8, 8),
                                         PimInstruction::arith(Opcode::kMulRed, 40, 0, 8, 8),
                                         PimInstruction::arith(Opcode::kAdd, 32, 0, 8, 8), PimInstruction::disable()};
  auto run = [&](bool log) {
    BankState bank(48, 4, 2);
    bank.store_vertical(0, a, 8);
    bank.store_vertical(8, b, 8);
    auto r = execute_program(prog, bank, cfg, log);
    return std::make_pair(r, bank.raw());
  };
  const auto [quiet, q_state] = run(false);
  const auto [loud, l_state] = run(true);
  CHECK(q_state == l_state);
  CHECK(quiet.trace.same_counts(loud.trace));

  EngineOptions eo = EngineOptions::from_config(cfg);
  BitSerialEngine e(eo);
  const auto A = transpose_to_vertical(a, 8), B = transpose_to_vertical(b, 8);
  EventTrace sum;
  sum += e.mul(A, B, 8).trace;
  sum += e.mul_red(A, B, 8).trace;
  sum += e.add_serial(A, B, 8).trace;
  CHECK(sum.same_counts(quiet.trace));
}

TEST_CASE("successive rows interleave across subarrays") {
  BankState bank(16, 4, 4);
  CHECK(bank.locate(0).subarray == 0);
  CHECK(bank.locate(1).subarray == 1);
  CHECK(bank.locate(5).subarray == 1);
  CHECK(bank.locate(5).row == 1);
}
