// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

// PIM command set: encoding onto address-bus words, text disassembly, the
// binary instruction-trace file, and a bank FSM that executes programs on the
// bit-serial engine.
//
// Word layout. Word 0 carries the 6-bit opcode in its low bits. Operand and
// control fields follow as one little-endian bit stream packed into words of
// device_data_width bits, in this order:
//   add, mul, mul_red   r_dst:16 r_src1:16 r_src2:16 prec:4
//   add_parallel        r_dst:16 r_src1:16 r_src2:16
//   bc_enable           bank_bc:1 col_bc:1
//   enable, disable, bc_disable   (no operand words)

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "racam/arch_config.hpp"
#include "racam/bit_matrix.hpp"
#include "racam/bitserial_engine.hpp"

namespace racam {

enum class Opcode : uint8_t {
  kBroadcastEnable = 0b000000,
  kBroadcastDisable = 0b000001,
  kPimEnable = 0b000010,
  kPimDisable = 0b000011,
  kAdd = 0b010000,
  kMul = 0b010001,
  kMulRed = 0b010010,
  kAddParallel = 0b010011,
};

inline constexpr unsigned kRowAddressBits = 16;
inline constexpr unsigned kPrecisionBits = 4;

std::string_view opcode_mnemonic(Opcode op);
std::optional<Opcode> opcode_from_bits(uint64_t bits);
std::optional<Opcode> opcode_from_mnemonic(std::string_view m);

/// True for add, mul and mul_red (the opcodes carrying a precision field).
bool has_precision(Opcode op);
bool has_row_operands(Opcode op);

struct PimInstruction {
  Opcode opcode = Opcode::kPimEnable;
  uint16_t r_dst = 0;
  uint16_t r_src1 = 0;
  uint16_t r_src2 = 0;
  uint8_t prec = 0;
  bool bank_bc = false;
  bool col_bc = false;

  bool operator==(const PimInstruction&) const = default;

  static PimInstruction enable() { return {Opcode::kPimEnable}; }
  static PimInstruction disable() { return {Opcode::kPimDisable}; }
  static PimInstruction bc_enable(bool bank, bool col) {
    PimInstruction i{Opcode::kBroadcastEnable};
    i.bank_bc = bank;
    i.col_bc = col;
    return i;
  }
  static PimInstruction bc_disable() { return {Opcode::kBroadcastDisable}; }
  static PimInstruction arith(Opcode op, uint16_t dst, uint16_t src1, uint16_t src2, uint8_t prec) {
    return {op, dst, src1, src2, prec, false, false};
  }
};

class IsaError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class ModeError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Throws IsaError if fields unused by the opcode are set or prec is outside
/// [1, max_precision] for opcodes that carry it.
void validate_instruction(const PimInstruction& instr, unsigned max_precision = 15);

/// Number of operand bits that follow the opcode word.
unsigned operand_bits(Opcode op);

std::vector<uint64_t> encode(const PimInstruction& instr, unsigned word_bits);

struct Decoded {
  PimInstruction instr;
  size_t words = 0;  // words consumed
};
/// Decodes one instruction from the front of `words`.
Decoded decode(std::span<const uint64_t> words, unsigned word_bits);

std::vector<uint64_t> encode_program(std::span<const PimInstruction> prog, unsigned word_bits);
std::vector<PimInstruction> decode_program(std::span<const uint64_t> words, unsigned word_bits);

/// One instruction per line, e.g. "pim_mul dst=8 src1=0 src2=4 prec=4".
std::string disassemble(const PimInstruction& instr);
std::string disassemble_program(std::span<const PimInstruction> prog);
PimInstruction parse_instruction(std::string_view line);
/// Blank lines and lines starting with '#' are skipped.
std::vector<PimInstruction> parse_program(std::string_view text);

/// Binary trace file: "RACAMPIM", u32 version, u64 config hash, u32 word
/// width, u64 word count, then the words as u64, all little-endian.
struct TraceFile {
  static constexpr uint32_t kVersion = 1;
  uint64_t config_hash = 0;
  uint32_t word_bits = 0;
  std::vector<uint64_t> words;

  bool operator==(const TraceFile&) const = default;
};
std::string serialize_trace(const TraceFile& f);
TraceFile deserialize_trace(std::string_view bytes);
void write_trace_file(const std::string& path, const TraceFile& f);
TraceFile read_trace_file(const std::string& path);

enum class BroadcastMode : uint8_t { kOff, kBank, kColumn, kBoth };
std::string_view broadcast_mode_name(BroadcastMode m);

struct ModeState {
  bool pim_mode = false;
  BroadcastMode broadcast = BroadcastMode::kOff;
  bool operator==(const ModeState&) const = default;
};

/// Storage of one compute block: logical rows of `lanes` bits. Logical row r
/// lives in subarray r % subarrays at physical row r / subarrays, so operand
/// bits read back to back hit different subarrays.
class BankState {
 public:
  BankState(size_t rows, size_t lanes, size_t subarrays = 1);

  size_t rows() const { return array_.depth(); }
  size_t lanes() const { return array_.lanes(); }
  size_t subarrays() const { return subarrays_; }
  const ModeState& mode() const { return mode_; }
  ModeState& mode() { return mode_; }

  struct Location {
    size_t subarray;
    size_t row;
  };
  Location locate(size_t logical_row) const;

  /// Host access; only legal outside PIM mode.
  void store_vertical(size_t row, std::span<const uint64_t> values, unsigned n);
  std::vector<uint64_t> load_vertical(size_t row, size_t lanes, unsigned n) const;
  int32_t load_horizontal(size_t row) const;
  void store_horizontal(size_t row, int32_t v);

  // Unchecked variants used by the FSM itself.
  BitMatrix read_rows(size_t row, unsigned n) const;
  void write_rows(size_t row, const BitMatrix& m);
  int32_t read_horizontal_raw(size_t row) const;
  void write_horizontal_raw(size_t row, int32_t v);

  const BitMatrix& raw() const { return array_; }

 private:
  void check_range(size_t row, size_t count) const;
  void require_host_mode() const;

  BitMatrix array_;
  size_t subarrays_;
  ModeState mode_;
};

struct ExecutionResult {
  EventTrace trace;
  size_t executed = 0;
  size_t add_parallel_wraps = 0;
};

/// Runs `prog` sequentially on `bank` starting from its current mode.
ExecutionResult execute_program(std::span<const PimInstruction> prog, BankState& bank, const SystemConfig& cfg,
                                bool log_events = false);

}  // namespace racam
