// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "racam/pim_isa.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace racam {

namespace {

struct OpInfo {
  Opcode op;
  std::string_view mnemonic;
};

constexpr std::array<OpInfo, 8> kOps{{
    {Opcode::kBroadcastEnable, "pim_bc_enable"},
    {Opcode::kBroadcastDisable, "pim_bc_disable"},
    {Opcode::kPimEnable, "pim_enable"},
    {Opcode::kPimDisable, "pim_disable"},
    {Opcode::kAdd, "pim_add"},
    {Opcode::kMul, "pim_mul"},
    {Opcode::kMulRed, "pim_mul_red"},
    {Opcode::kAddParallel, "pim_add_parallel"},
}};

uint64_t word_mask(unsigned bits) { return bits >= 64 ? ~uint64_t{0} : (uint64_t{1} << bits) - 1; }

void check_word_bits(unsigned word_bits) {
  if (word_bits < 6 || word_bits > 64)
    throw IsaError("word width " + std::to_string(word_bits) + " cannot carry a 6-bit opcode");
}

// Little-endian bit stream over fixed-width words.
class BitWriter {
 public:
  explicit BitWriter(unsigned word_bits) : w_(word_bits) {}
  void put(uint64_t v, unsigned bits) {
    for (unsigned i = 0; i < bits; ++i) {
      if (pos_ % w_ == 0) words_.push_back(0);
      words_.back() |= ((v >> i) & 1u) << (pos_ % w_);
      ++pos_;
    }
  }
  std::vector<uint64_t> take() { return std::move(words_); }

 private:
  unsigned w_;
  size_t pos_ = 0;
  std::vector<uint64_t> words_;
};

class BitReader {
 public:
  BitReader(std::span<const uint64_t> words, unsigned word_bits) : words_(words), w_(word_bits) {}
  uint64_t get(unsigned bits) {
    uint64_t v = 0;
    for (unsigned i = 0; i < bits; ++i, ++pos_) v |= ((words_[pos_ / w_] >> (pos_ % w_)) & 1u) << i;
    return v;
  }

 private:
  std::span<const uint64_t> words_;
  unsigned w_;
  size_t pos_ = 0;
};

size_t operand_words(Opcode op, unsigned word_bits) { return (operand_bits(op) + word_bits - 1) / word_bits; }

}  // namespace

std::string_view opcode_mnemonic(Opcode op) {
  for (const auto& o : kOps)
    if (o.op == op) return o.mnemonic;
  return "pim_unknown";
}

std::optional<Opcode> opcode_from_bits(uint64_t bits) {
  for (const auto& o : kOps)
    if (static_cast<uint64_t>(o.op) == bits) return o.op;
  return std::nullopt;
}

std::optional<Opcode> opcode_from_mnemonic(std::string_view m) {
  for (const auto& o : kOps)
    if (o.mnemonic == m) return o.op;
  return std::nullopt;
}

bool has_precision(Opcode op) { return op == Opcode::kAdd || op == Opcode::kMul || op == Opcode::kMulRed; }
bool has_row_operands(Opcode op) { return has_precision(op) || op == Opcode::kAddParallel; }

unsigned operand_bits(Opcode op) {
  if (has_precision(op)) return 3 * kRowAddressBits + kPrecisionBits;
  if (op == Opcode::kAddParallel) return 3 * kRowAddressBits;
  if (op == Opcode::kBroadcastEnable) return 2;
  return 0;
}

void validate_instruction(const PimInstruction& in, unsigned max_precision) {
  if (!opcode_from_bits(static_cast<uint64_t>(in.opcode)))
    throw IsaError("invalid opcode " + std::to_string(static_cast<unsigned>(in.opcode)));
  const std::string name(opcode_mnemonic(in.opcode));
  if (has_precision(in.opcode)) {
    const unsigned cap = std::min(max_precision, (1u << kPrecisionBits) - 1);
    if (in.prec < 1 || in.prec > cap)
      throw IsaError(name + ": precision " + std::to_string(in.prec) + " outside [1, " + std::to_string(cap) + "]");
  } else if (in.prec != 0) {
    throw IsaError(name + " carries no precision field");
  }
  if (!has_row_operands(in.opcode) && (in.r_dst || in.r_src1 || in.r_src2))
    throw IsaError(name + " carries no row operands");
  if (in.opcode != Opcode::kBroadcastEnable && (in.bank_bc || in.col_bc))
    throw IsaError(name + " carries no broadcast flags");
}

std::vector<uint64_t> encode(const PimInstruction& in, unsigned word_bits) {
  check_word_bits(word_bits);
  validate_instruction(in);
  std::vector<uint64_t> out{static_cast<uint64_t>(in.opcode)};
  BitWriter w(word_bits);
  if (has_row_operands(in.opcode)) {
    w.put(in.r_dst, kRowAddressBits);
    w.put(in.r_src1, kRowAddressBits);
    w.put(in.r_src2, kRowAddressBits);
  }
  if (has_precision(in.opcode)) w.put(in.prec, kPrecisionBits);
  if (in.opcode == Opcode::kBroadcastEnable) {
    w.put(in.bank_bc, 1);
    w.put(in.col_bc, 1);
  }
  auto fields = w.take();
  out.insert(out.end(), fields.begin(), fields.end());
  return out;
}

Decoded decode(std::span<const uint64_t> words, unsigned word_bits) {
  check_word_bits(word_bits);
  if (words.empty()) throw IsaError("decode: empty word sequence");
  if (words[0] & ~word_mask(word_bits)) throw IsaError("decode: word wider than the bus");
  const auto op = opcode_from_bits(words[0]);
  if (!op) throw IsaError("decode: unknown opcode " + std::to_string(words[0]));
  const size_t nw = operand_words(*op, word_bits);
  if (words.size() < 1 + nw)
    throw IsaError("decode: truncated " + std::string(opcode_mnemonic(*op)) + ", need " + std::to_string(nw) +
                   " operand words");
  auto fields = words.subspan(1, nw);
  for (uint64_t w : fields)
    if (w & ~word_mask(word_bits)) throw IsaError("decode: word wider than the bus");
  BitReader r(fields, word_bits);
  PimInstruction in{*op};
  if (has_row_operands(*op)) {
    in.r_dst = static_cast<uint16_t>(r.get(kRowAddressBits));
    in.r_src1 = static_cast<uint16_t>(r.get(kRowAddressBits));
    in.r_src2 = static_cast<uint16_t>(r.get(kRowAddressBits));
  }
  if (has_precision(*op)) in.prec = static_cast<uint8_t>(r.get(kPrecisionBits));
  if (*op == Opcode::kBroadcastEnable) {
    in.bank_bc = r.get(1) != 0;
    in.col_bc = r.get(1) != 0;
  }
  if (has_precision(*op) && in.prec == 0) throw IsaError("decode: zero precision");
  return {in, 1 + nw};
}

std::vector<uint64_t> encode_program(std::span<const PimInstruction> prog, unsigned word_bits) {
  std::vector<uint64_t> out;
  for (const auto& in : prog) {
    auto w = encode(in, word_bits);
    out.insert(out.end(), w.begin(), w.end());
  }
  return out;
}

std::vector<PimInstruction> decode_program(std::span<const uint64_t> words, unsigned word_bits) {
  std::vector<PimInstruction> out;
  size_t pos = 0;
  while (pos < words.size()) {
    auto d = decode(words.subspan(pos), word_bits);
    out.push_back(d.instr);
    pos += d.words;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text form

std::string disassemble(const PimInstruction& in) {
  std::ostringstream o;
  o << opcode_mnemonic(in.opcode);
  if (has_row_operands(in.opcode)) o << " dst=" << in.r_dst << " src1=" << in.r_src1 << " src2=" << in.r_src2;
  if (has_precision(in.opcode)) o << " prec=" << static_cast<unsigned>(in.prec);
  if (in.opcode == Opcode::kBroadcastEnable) o << " bank=" << in.bank_bc << " col=" << in.col_bc;
  return o.str();
}

std::string disassemble_program(std::span<const PimInstruction> prog) {
  std::string out;
  for (const auto& in : prog) out += disassemble(in) + "\n";
  return out;
}

PimInstruction parse_instruction(std::string_view line) {
  std::istringstream s{std::string(line)};
  std::string mn;
  s >> mn;
  const auto op = opcode_from_mnemonic(mn);
  if (!op) throw IsaError("unknown mnemonic '" + mn + "'");
  PimInstruction in{*op};
  std::string tok;
  while (s >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw IsaError("malformed operand '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    unsigned v = 0;
    const char* b = tok.data() + eq + 1;
    const char* e = tok.data() + tok.size();
    if (auto [p, ec] = std::from_chars(b, e, v); ec != std::errc() || p != e || v > 0xFFFF)
      throw IsaError("bad value in '" + tok + "'");
    if (key == "dst") {
      in.r_dst = static_cast<uint16_t>(v);
    } else if (key == "src1") {
      in.r_src1 = static_cast<uint16_t>(v);
    } else if (key == "src2") {
      in.r_src2 = static_cast<uint16_t>(v);
    } else if (key == "prec") {
      if (v > 15) throw IsaError("precision does not fit 4 bits");
      in.prec = static_cast<uint8_t>(v);
    } else if (key == "bank") {
      in.bank_bc = v != 0;
    } else if (key == "col") {
      in.col_bc = v != 0;
    } else {
      throw IsaError("unknown operand '" + key + "'");
    }
  }
  validate_instruction(in);
  return in;
}

std::vector<PimInstruction> parse_program(std::string_view text) {
  std::vector<PimInstruction> out;
  std::istringstream s{std::string(text)};
  std::string line;
  while (std::getline(s, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(parse_instruction(std::string_view(line).substr(first)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trace file

namespace {

constexpr std::string_view kMagic = "RACAMPIM";

template <typename T>
void put_le(std::string& s, T v) {
  for (size_t i = 0; i < sizeof(T); ++i) s.push_back(static_cast<char>((static_cast<uint64_t>(v) >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(std::string_view s, size_t& pos) {
  if (pos + sizeof(T) > s.size()) throw IsaError("trace file truncated");
  uint64_t v = 0;
  for (size_t i = 0; i < sizeof(T); ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(s[pos + i])) << (8 * i);
  pos += sizeof(T);
  return static_cast<T>(v);
}

}  // namespace

std::string serialize_trace(const TraceFile& f) {
  std::string s(kMagic);
  put_le<uint32_t>(s, TraceFile::kVersion);
  put_le<uint64_t>(s, f.config_hash);
  put_le<uint32_t>(s, f.word_bits);
  put_le<uint64_t>(s, f.words.size());
  for (uint64_t w : f.words) put_le<uint64_t>(s, w);
  return s;
}

TraceFile deserialize_trace(std::string_view bytes) {
  if (bytes.substr(0, kMagic.size()) != kMagic) throw IsaError("not a PIM trace file (bad magic)");
  size_t pos = kMagic.size();
  const auto version = get_le<uint32_t>(bytes, pos);
  if (version != TraceFile::kVersion) throw IsaError("unsupported trace version " + std::to_string(version));
  TraceFile f;
  f.config_hash = get_le<uint64_t>(bytes, pos);
  f.word_bits = get_le<uint32_t>(bytes, pos);
  const auto count = get_le<uint64_t>(bytes, pos);
  if (count > (bytes.size() - pos) / 8) throw IsaError("trace file truncated");
  f.words.reserve(count);
  for (uint64_t i = 0; i < count; ++i) f.words.push_back(get_le<uint64_t>(bytes, pos));
  if (pos != bytes.size()) throw IsaError("trailing bytes after trace words");
  return f;
}

void write_trace_file(const std::string& path, const TraceFile& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const std::string s = serialize_trace(f);
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

TraceFile read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_trace(ss.str());
}

// ---------------------------------------------------------------------------
// Bank FSM

std::string_view broadcast_mode_name(BroadcastMode m) {
  switch (m) {
    case BroadcastMode::kOff:
      return "off";
    case BroadcastMode::kBank:
      return "bank";
    case BroadcastMode::kColumn:
      return "column";
    case BroadcastMode::kBoth:
      return "both";
  }
  return "unknown";
}

BankState::BankState(size_t rows, size_t lanes, size_t subarrays) : array_(lanes, rows), subarrays_(subarrays) {
  if (subarrays == 0) throw std::invalid_argument("BankState needs at least one subarray");
}

BankState::Location BankState::locate(size_t r) const {
  check_range(r, 1);
  return {r % subarrays_, r / subarrays_};
}

void BankState::check_range(size_t row, size_t count) const {
  if (row + count > rows())
    throw std::out_of_range("rows [" + std::to_string(row) + ", " + std::to_string(row + count) +
                            ") exceed bank capacity " + std::to_string(rows()));
}

void BankState::require_host_mode() const {
  if (mode_.pim_mode) throw ModeError("host access while the bank is in PIM mode");
}

BitMatrix BankState::read_rows(size_t row, unsigned n) const {
  check_range(row, n);
  BitMatrix m(lanes(), n);
  for (unsigned b = 0; b < n; ++b) {
    auto src = array_.row(row + b);
    std::copy(src.begin(), src.end(), m.row(b).begin());
  }
  return m;
}

void BankState::write_rows(size_t row, const BitMatrix& m) {
  check_range(row, m.depth());
  if (m.lanes() != lanes()) throw LaneMismatch("row write lane count differs from bank width");
  for (size_t b = 0; b < m.depth(); ++b) {
    auto src = m.row(b);
    std::copy(src.begin(), src.end(), array_.row(row + b).begin());
  }
}

int32_t BankState::read_horizontal_raw(size_t row) const {
  const size_t span = (32 + lanes() - 1) / lanes();
  check_range(row, span);
  uint32_t v = 0;
  for (unsigned j = 0; j < 32; ++j) v |= static_cast<uint32_t>(array_.bit(row + j / lanes(), j % lanes())) << j;
  return static_cast<int32_t>(v);
}

void BankState::write_horizontal_raw(size_t row, int32_t value) {
  const size_t span = (32 + lanes() - 1) / lanes();
  check_range(row, span);
  const auto v = static_cast<uint32_t>(value);
  for (size_t r = row; r < row + span; ++r)
    for (auto& w : array_.row(r)) w = 0;
  for (unsigned j = 0; j < 32; ++j) array_.set_bit(row + j / lanes(), j % lanes(), (v >> j) & 1u);
}

void BankState::store_vertical(size_t row, std::span<const uint64_t> values, unsigned n) {
  require_host_mode();
  if (values.size() > lanes()) throw LaneMismatch("more values than bank lanes");
  std::vector<uint64_t> padded(values.begin(), values.end());
  padded.resize(lanes(), 0);
  write_rows(row, transpose_to_vertical(padded, n));
}

std::vector<uint64_t> BankState::load_vertical(size_t row, size_t count, unsigned n) const {
  require_host_mode();
  auto v = read_rows(row, n).lane_values();
  if (count > v.size()) throw LaneMismatch("more values requested than bank lanes");
  v.resize(count);
  return v;
}

int32_t BankState::load_horizontal(size_t row) const {
  require_host_mode();
  return read_horizontal_raw(row);
}

void BankState::store_horizontal(size_t row, int32_t v) {
  require_host_mode();
  write_horizontal_raw(row, v);
}

ExecutionResult execute_program(std::span<const PimInstruction> prog, BankState& bank, const SystemConfig& cfg,
                                bool log_events) {
  EngineOptions eo = EngineOptions::from_config(cfg);
  eo.lb_cols = std::max(eo.lb_cols, bank.lanes());
  eo.log_events = log_events;
  BitSerialEngine engine(eo);
  ExecutionResult res;
  res.trace = EventTrace(log_events, eo.log_limit);
  const auto max_prec = static_cast<unsigned>(cfg.max_precision);

  for (const PimInstruction& in : prog) {
    validate_instruction(in, max_prec);
    ModeState& mode = bank.mode();
    const std::string name(opcode_mnemonic(in.opcode));
    if (has_row_operands(in.opcode) && !mode.pim_mode) throw ModeError(name + " issued outside PIM mode");
    switch (in.opcode) {
      case Opcode::kPimEnable:
        mode.pim_mode = true;
        break;
      case Opcode::kPimDisable:
        mode.pim_mode = false;
        break;
      case Opcode::kBroadcastEnable:
        if (!cfg.periph.bu_enabled) throw BroadcastDisabled("pim_bc_enable with broadcast units disabled");
        mode.broadcast = in.bank_bc && in.col_bc ? BroadcastMode::kBoth
                         : in.bank_bc            ? BroadcastMode::kBank
                         : in.col_bc             ? BroadcastMode::kColumn
                                                 : BroadcastMode::kOff;
        break;
      case Opcode::kBroadcastDisable:
        if (!cfg.periph.bu_enabled) throw BroadcastDisabled("pim_bc_disable with broadcast units disabled");
        mode.broadcast = BroadcastMode::kOff;
        break;
      case Opcode::kAdd: {
        auto r = engine.add_serial(bank.read_rows(in.r_src1, in.prec), bank.read_rows(in.r_src2, in.prec), in.prec);
        bank.write_rows(in.r_dst, r.value);
        res.trace += r.trace;
        break;
      }
      case Opcode::kMul: {
        auto r = engine.mul(bank.read_rows(in.r_src1, in.prec), bank.read_rows(in.r_src2, in.prec), in.prec);
        bank.write_rows(in.r_dst, r.value);
        res.trace += r.trace;
        break;
      }
      case Opcode::kMulRed: {
        auto r = engine.mul_red(bank.read_rows(in.r_src1, in.prec), bank.read_rows(in.r_src2, in.prec), in.prec);
        bank.write_horizontal_raw(in.r_dst, static_cast<int32_t>(static_cast<uint32_t>(r.sums[0])));
        res.trace += r.trace;
        break;
      }
      case Opcode::kAddParallel: {
        auto r = engine.add_parallel(bank.read_horizontal_raw(in.r_src1), bank.read_horizontal_raw(in.r_src2));
        bank.write_horizontal_raw(in.r_dst, r.value);
        res.add_parallel_wraps += r.wrapped;
        res.trace += r.trace;
        break;
      }
    }
    ++res.executed;
  }
  return res;
}

}  // namespace racam
