// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "racam/bitserial_engine.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include <json.hpp>

#include "racam/simd/bitplane.hpp"

namespace racam {

// ---------------------------------------------------------------------------
// EventTrace

std::string_view event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::kArrayRowRead:
      return "array_row_read";
    case EventKind::kArrayRowWrite:
      return "array_row_write";
    case EventKind::kLbAccess:
      return "lb_access";
    case EventKind::kPeStep:
      return "pe_step";
    case EventKind::kPcStep:
      return "pc_step";
    case EventKind::kAddpStep:
      return "addp_step";
    case EventKind::kBcastWord:
      return "bcast_word";
  }
  return "unknown";
}

void EventTrace::record(EventKind k, int32_t slot, int32_t bit) {
  ++counters_[static_cast<size_t>(k)];
  if (!logging_) return;
  if (log_.size() >= log_limit_) {
    truncated_ = true;
    return;
  }
  log_.push_back({k, slot, bit});
}

void EventTrace::add_count(EventKind k, uint64_t n) { counters_[static_cast<size_t>(k)] += n; }

EventTrace& EventTrace::operator+=(const EventTrace& other) {
  for (size_t i = 0; i < kEventKindCount; ++i) counters_[i] += other.counters_[i];
  if (logging_) {
    for (const Event& e : other.log_) {
      if (log_.size() >= log_limit_) {
        truncated_ = true;
        break;
      }
      log_.push_back(e);
    }
    truncated_ = truncated_ || other.truncated_;
  }
  return *this;
}

std::string EventTrace::to_jsonl(bool include_log) const {
  std::ostringstream o;
  for (size_t i = 0; i < kEventKindCount; ++i) {
    nlohmann::json j{{"record", "counter"},
                     {"name", std::string(event_kind_name(static_cast<EventKind>(i)))},
                     {"value", counters_[i]}};
    o << j.dump() << "\n";
  }
  if (include_log && logging_) {
    for (size_t i = 0; i < log_.size(); ++i) {
      nlohmann::json j{{"record", "event"},
                       {"seq", i},
                       {"kind", std::string(event_kind_name(log_[i].kind))},
                       {"slot", log_[i].slot},
                       {"bit", log_[i].bit}};
      o << j.dump() << "\n";
    }
    if (truncated_) o << nlohmann::json{{"record", "log_truncated"}}.dump() << "\n";
  }
  return o.str();
}

// ---------------------------------------------------------------------------
// LocalityBufferState

LocalityBufferState::LocalityBufferState(size_t rows, size_t cols)
    : rows_(rows),
      cols_(cols),
      words_((cols + 63) / 64),
      cells_(rows * words_, 0),
      carry_(words_, 0),
      live_(rows, false) {}

std::span<uint64_t> LocalityBufferState::slot(size_t r) {
  if (r >= rows_) throw BufferTooSmall("locality buffer row " + std::to_string(r) + " out of range");
  return {cells_.data() + r * words_, words_};
}

std::span<const uint64_t> LocalityBufferState::slot(size_t r) const {
  if (r >= rows_) throw BufferTooSmall("locality buffer row " + std::to_string(r) + " out of range");
  return {cells_.data() + r * words_, words_};
}

void LocalityBufferState::clear() {
  std::fill(cells_.begin(), cells_.end(), 0);
  std::fill(carry_.begin(), carry_.end(), 0);
  std::fill(live_.begin(), live_.end(), false);
  live_count_ = 0;
  max_live_ = 0;
}

void LocalityBufferState::occupy(size_t r) {
  if (!live_.at(r)) {
    live_[r] = true;
    max_live_ = std::max(max_live_, ++live_count_);
  }
}

void LocalityBufferState::release(size_t r) {
  if (live_.at(r)) {
    live_[r] = false;
    --live_count_;
  }
}

// ---------------------------------------------------------------------------
// BitSerialEngine

EngineOptions EngineOptions::from_config(const SystemConfig& cfg) {
  EngineOptions o;
  o.lb_rows = static_cast<size_t>(cfg.periph.lb_rows);
  o.lb_cols = static_cast<size_t>(cfg.periph.lb_cols);
  o.popcount_width_bits = static_cast<unsigned>(cfg.periph.popcount_width_bits);
  o.lb_enabled = cfg.periph.lb_enabled;
  return o;
}

BitSerialEngine::BitSerialEngine(EngineOptions opts) : opts_(opts), lb_(opts.lb_rows, opts.lb_cols) {}

namespace {

// Set bits of `row` within lanes [begin, end).
uint64_t popcount_range(std::span<const uint64_t> row, size_t begin, size_t end) {
  if (begin >= end) return 0;
  const size_t wb = begin / 64;
  const size_t we = (end - 1) / 64;
  const uint64_t lo_mask = ~uint64_t{0} << (begin % 64);
  const uint64_t hi_mask = (end % 64) == 0 ? ~uint64_t{0} : ((uint64_t{1} << (end % 64)) - 1);
  if (wb == we) return static_cast<uint64_t>(std::popcount(row[wb] & lo_mask & hi_mask));
  uint64_t n = static_cast<uint64_t>(std::popcount(row[wb] & lo_mask)) +
               static_cast<uint64_t>(std::popcount(row[we] & hi_mask));
  if (we > wb + 1) n += simd::kernels().popcount(row.data() + wb + 1, we - wb - 1);
  return n;
}

std::vector<uint64_t> ones_row(size_t lanes) {
  std::vector<uint64_t> r((lanes + 63) / 64, ~uint64_t{0});
  if (lanes % 64) r.back() = (uint64_t{1} << (lanes % 64)) - 1;
  return r;
}

}  // namespace

void BitSerialEngine::check_operands(const BitMatrix& op1, const BitMatrix& op2, unsigned n, bool needs_buffer) const {
  if (n == 0 || n > 32) throw std::invalid_argument("precision must be in [1, 32]");
  if (op1.lanes() != op2.lanes())
    throw LaneMismatch("operand lane counts differ: " + std::to_string(op1.lanes()) + " vs " +
                       std::to_string(op2.lanes()));
  if (op1.depth() != n || op2.depth() != n)
    throw LaneMismatch("operand depth does not match precision " + std::to_string(n));
  if (op1.lanes() > opts_.lb_cols)
    throw LaneMismatch("operand lanes " + std::to_string(op1.lanes()) + " exceed PE count " +
                       std::to_string(opts_.lb_cols));
  if (needs_buffer && opts_.lb_rows < 2 * static_cast<size_t>(n) + 1)
    throw BufferTooSmall("locality buffer too small: " + std::to_string(2 * n + 1) + " rows needed for n=" +
                         std::to_string(n) + ", have " + std::to_string(opts_.lb_rows));
}

void BitSerialEngine::check_accumulator(uint64_t v) const {
  if (opts_.popcount_width_bits < 64 && (v >> opts_.popcount_width_bits) != 0)
    throw AccumulatorOverflow("popcount accumulator exceeds " + std::to_string(opts_.popcount_width_bits) + " bits");
}

// Step schedule of the reuse multiply:
//   step 0   load op1 bits 0..n-1 and op2 bit 0; result bits 0..n-1 = op1 gated
//            by op2 bit 0; result bit 0 leaves the buffer.
//   step i   load op2 bit i; add op1 into result bits i..i+n-1, the carry lands
//            in bit i+n; bit i leaves the buffer right after it is updated.
//   final    bits n..2n-1 leave the buffer.
// Every operand bit is read from the array once and every product bit leaves
// the buffer once.
template <typename Sink>
void BitSerialEngine::reuse_schedule(const BitMatrix& op1, const BitMatrix& op2, unsigned n, EventTrace& t,
                                     Sink&& sink) {
  const auto& k = simd::kernels();
  const size_t w = op1.words_per_row();
  const size_t op2_slot = n;
  const size_t ring = n + 1;
  const std::vector<uint64_t> zero(w, 0);
  const std::vector<uint64_t> ones = ones_row(op1.lanes());

  lb_.clear();
  std::vector<int64_t> holder(n, -1);  // product bit held by each ring slot

  auto result_slot = [&](unsigned r) -> size_t {
    const size_t idx = r % n;
    const size_t s = ring + idx;
    if (holder[idx] != static_cast<int64_t>(r)) {
      auto row = lb_.slot(s);
      std::fill(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(w), 0);
      holder[idx] = r;
      lb_.occupy(s);
    }
    return s;
  };
  auto retire = [&](unsigned r) {
    const size_t s = result_slot(r);
    t.record(EventKind::kLbAccess, static_cast<int32_t>(s), static_cast<int32_t>(r));
    sink(r, std::span<const uint64_t>(lb_.slot(s).data(), w), static_cast<int32_t>(s));
    holder[r % n] = -1;
    lb_.release(s);
  };
  auto load = [&](const BitMatrix& m, unsigned bit, size_t s) {
    auto dst = lb_.slot(s);
    auto src = m.row(bit);
    std::copy(src.begin(), src.end(), dst.begin());
    lb_.occupy(s);
    t.record(EventKind::kArrayRowRead, static_cast<int32_t>(s), static_cast<int32_t>(bit));
    t.record(EventKind::kLbAccess, static_cast<int32_t>(s), static_cast<int32_t>(bit));
  };
  auto pe_pass = [&](const uint64_t* a, const uint64_t* b, size_t s, unsigned r) {
    uint64_t* c = lb_.slot(s).data();
    k.gated_full_add(a, b, c, lb_.carry().data(), c, w);
    t.record(EventKind::kPeStep, static_cast<int32_t>(s), static_cast<int32_t>(r));
    t.record(EventKind::kLbAccess, static_cast<int32_t>(s), static_cast<int32_t>(r));
  };
  auto clear_carry = [&] { std::fill(lb_.carry().begin(), lb_.carry().end(), 0); };

  for (unsigned j = 0; j < n; ++j) load(op1, j, j);
  load(op2, 0, op2_slot);
  clear_carry();
  for (unsigned j = 0; j < n; ++j) pe_pass(lb_.slot(j).data(), lb_.slot(op2_slot).data(), result_slot(j), j);
  retire(0);

  for (unsigned i = 1; i < n; ++i) {
    load(op2, i, op2_slot);
    clear_carry();
    for (unsigned j = 0; j < n; ++j) {
      pe_pass(lb_.slot(j).data(), lb_.slot(op2_slot).data(), result_slot(i + j), i + j);
      if (j == 0) retire(i);
    }
    // Carry deposit: a=0, b=1 routes the carry into the new top bit.
    pe_pass(zero.data(), ones.data(), result_slot(i + n), i + n);
  }
  for (unsigned r = n; r < 2 * n; ++r) retire(r);

  for (size_t s = 0; s <= n; ++s) lb_.release(s);
}

// No-reuse multiply: round i reads multiplier bit i, re-reads every
// multiplicand bit, and writes the whole 2n-bit partial sum back.
template <typename Sink>
void BitSerialEngine::baseline_schedule(const BitMatrix& op1, const BitMatrix& op2, unsigned n, EventTrace& t,
                                        Sink&& sink) {
  const auto& k = simd::kernels();
  const size_t w = op1.words_per_row();
  const std::vector<uint64_t> zero(w, 0);
  const std::vector<uint64_t> ones = ones_row(op1.lanes());
  std::vector<uint64_t> partial(2 * n * w, 0);
  std::vector<uint64_t> carry(w, 0);
  auto prow = [&](unsigned r) { return partial.data() + r * w; };

  for (unsigned i = 0; i < n; ++i) {
    t.record(EventKind::kArrayRowRead, -1, static_cast<int32_t>(i));
    std::fill(carry.begin(), carry.end(), 0);
    for (unsigned j = 0; j < n; ++j) {
      t.record(EventKind::kArrayRowRead, -1, static_cast<int32_t>(j));
      k.gated_full_add(op1.row(j).data(), op2.row(i).data(), prow(i + j), carry.data(), prow(i + j), w);
      t.record(EventKind::kPeStep, -1, static_cast<int32_t>(i + j));
    }
    k.gated_full_add(zero.data(), ones.data(), prow(i + n), carry.data(), prow(i + n), w);
    t.record(EventKind::kPeStep, -1, static_cast<int32_t>(i + n));
    for (unsigned r = 0; r < 2 * n; ++r) t.record(EventKind::kArrayRowWrite, -1, static_cast<int32_t>(r));
  }
  for (unsigned r = 0; r < 2 * n; ++r) sink(r, std::span<const uint64_t>(prow(r), w), -1);
}

MatrixResult BitSerialEngine::mul_reuse(const BitMatrix& op1, const BitMatrix& op2, unsigned n) {
  check_operands(op1, op2, n, true);
  MatrixResult res{BitMatrix(op1.lanes(), 2 * n), new_trace()};
  reuse_schedule(op1, op2, n, res.trace, [&](unsigned r, std::span<const uint64_t> row, int32_t slot) {
    std::copy(row.begin(), row.end(), res.value.row(r).begin());
    res.trace.record(EventKind::kArrayRowWrite, slot, static_cast<int32_t>(r));
  });
  return res;
}

MatrixResult BitSerialEngine::mul_baseline(const BitMatrix& op1, const BitMatrix& op2, unsigned n) {
  check_operands(op1, op2, n, false);
  MatrixResult res{BitMatrix(op1.lanes(), 2 * n), new_trace()};
  baseline_schedule(op1, op2, n, res.trace, [&](unsigned r, std::span<const uint64_t> row, int32_t) {
    std::copy(row.begin(), row.end(), res.value.row(r).begin());
  });
  return res;
}

MatrixResult BitSerialEngine::mul(const BitMatrix& op1, const BitMatrix& op2, unsigned n) {
  return opts_.lb_enabled ? mul_reuse(op1, op2, n) : mul_baseline(op1, op2, n);
}

MatrixResult BitSerialEngine::add_serial(const BitMatrix& op1, const BitMatrix& op2, unsigned n) {
  check_operands(op1, op2, n, false);
  const auto& k = simd::kernels();
  const size_t w = op1.words_per_row();
  const std::vector<uint64_t> zero(w, 0);
  const std::vector<uint64_t> ones = ones_row(op1.lanes());
  std::vector<uint64_t> carry(w, 0);
  MatrixResult res{BitMatrix(op1.lanes(), n + 1), new_trace()};
  auto& t = res.trace;
  const bool lb = opts_.lb_enabled;

  for (unsigned j = 0; j < n; ++j) {
    t.record(EventKind::kArrayRowRead, -1, static_cast<int32_t>(j));
    t.record(EventKind::kArrayRowRead, -1, static_cast<int32_t>(j));
    if (lb) {
      t.record(EventKind::kLbAccess, -1, static_cast<int32_t>(j));
      t.record(EventKind::kLbAccess, -1, static_cast<int32_t>(j));
    }
    auto out = res.value.row(j);
    std::copy(op2.row(j).begin(), op2.row(j).end(), out.begin());
    k.gated_full_add(op1.row(j).data(), ones.data(), out.data(), carry.data(), out.data(), w);
    t.record(EventKind::kPeStep, -1, static_cast<int32_t>(j));
    if (lb) t.record(EventKind::kLbAccess, -1, static_cast<int32_t>(j));
  }
  auto top = res.value.row(n);
  k.gated_full_add(zero.data(), ones.data(), top.data(), carry.data(), top.data(), w);
  t.record(EventKind::kPeStep, -1, static_cast<int32_t>(n));
  if (lb) t.record(EventKind::kLbAccess, -1, static_cast<int32_t>(n));
  for (unsigned r = 0; r <= n; ++r) {
    t.record(EventKind::kArrayRowWrite, -1, static_cast<int32_t>(r));
    if (lb) t.record(EventKind::kLbAccess, -1, static_cast<int32_t>(r));
  }
  return res;
}

ReduceResult BitSerialEngine::popcount_reduce(const BitMatrix& partials, size_t segments) {
  if (segments == 0 || partials.lanes() % segments != 0)
    throw LaneMismatch("lane count must split evenly into segments");
  ReduceResult res{std::vector<uint64_t>(segments, 0), new_trace()};
  const size_t seg_lanes = partials.lanes() / segments;
  for (size_t b = 0; b < partials.depth(); ++b) {
    res.trace.record(EventKind::kArrayRowRead, -1, static_cast<int32_t>(b));
    auto row = partials.row(b);
    for (size_t s = 0; s < segments; ++s) {
      const uint64_t cnt = popcount_range(row, s * seg_lanes, (s + 1) * seg_lanes);
      if (b >= 64 && cnt != 0) throw AccumulatorOverflow("popcount slice beyond 64 bits");
      res.sums[s] += b < 64 ? (cnt << b) : 0;
      check_accumulator(res.sums[s]);
      res.trace.record(EventKind::kPcStep, -1, static_cast<int32_t>(b));
    }
  }
  return res;
}

ReduceResult BitSerialEngine::mul_red(const BitMatrix& op1, const BitMatrix& op2, unsigned n, size_t segments,
                                      std::span<const uint64_t> accumulate) {
  const bool lb = opts_.lb_enabled;
  check_operands(op1, op2, n, lb);
  if (segments == 0 || op1.lanes() % segments != 0) throw LaneMismatch("lane count must split evenly into segments");
  if (!accumulate.empty() && accumulate.size() != segments)
    throw LaneMismatch("accumulator count must equal segment count");

  ReduceResult res{std::vector<uint64_t>(segments, 0), new_trace()};
  if (!accumulate.empty()) std::copy(accumulate.begin(), accumulate.end(), res.sums.begin());
  const size_t seg_lanes = op1.lanes() / segments;
  auto sink = [&](unsigned r, std::span<const uint64_t> row, int32_t) {
    for (size_t s = 0; s < segments; ++s) {
      res.sums[s] += popcount_range(row, s * seg_lanes, (s + 1) * seg_lanes) << r;
      check_accumulator(res.sums[s]);
      res.trace.record(EventKind::kPcStep, -1, static_cast<int32_t>(r));
    }
  };
  if (lb)
    reuse_schedule(op1, op2, n, res.trace, sink);
  else
    baseline_schedule(op1, op2, n, res.trace, sink);
  // Reduced results go back to the array in horizontal layout, one row.
  res.trace.record(EventKind::kArrayRowWrite);
  return res;
}

AddParallelResult BitSerialEngine::add_parallel(int32_t acc, int32_t addend) {
  AddParallelResult res;
  res.trace = new_trace();
  const uint32_t sum = static_cast<uint32_t>(acc) + static_cast<uint32_t>(addend);
  res.value = static_cast<int32_t>(sum);
  const int64_t wide = static_cast<int64_t>(acc) + static_cast<int64_t>(addend);
  res.wrapped = wide != static_cast<int64_t>(res.value);
  res.trace.record(EventKind::kAddpStep);
  return res;
}

BitSerialEngine::SignedDot BitSerialEngine::dot_signed(std::span<const int64_t> a, std::span<const int64_t> b,
                                                        unsigned n) {
  if (a.size() != b.size()) throw LaneMismatch("signed dot operands differ in length");
  if (n == 0 || n > 31) throw std::invalid_argument("signed precision must be in [1, 31]");
  const int64_t offset = int64_t{1} << (n - 1);
  std::vector<uint64_t> ua(a.size()), ub(b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] < -offset || a[i] >= offset || b[i] < -offset || b[i] >= offset)
      throw std::out_of_range("signed operand does not fit in " + std::to_string(n) + " bits");
    ua[i] = static_cast<uint64_t>(a[i] + offset);
    ub[i] = static_cast<uint64_t>(b[i] + offset);
  }
  const BitMatrix va = transpose_to_vertical(ua, n);
  const BitMatrix vb = transpose_to_vertical(ub, n);
  SignedDot out;
  out.trace = new_trace();
  auto prod = mul_red(va, vb, n);
  auto sa = popcount_reduce(va);
  auto sb = popcount_reduce(vb);
  out.trace += prod.trace;
  out.trace += sa.trace;
  out.trace += sb.trace;
  const auto k = static_cast<int64_t>(a.size());
  out.value = static_cast<int64_t>(prod.sums[0]) - offset * static_cast<int64_t>(sa.sums[0] + sb.sums[0]) +
              k * offset * offset;
  return out;
}

// ---------------------------------------------------------------------------
// Broadcast

namespace {

size_t fan_out(const std::vector<bool>& bank_mask, const std::vector<bool>& col_mask, const BroadcastTarget& target) {
  if (bank_mask.size() != target.banks || col_mask.size() != target.columns)
    throw std::invalid_argument("broadcast masks must match the target geometry");
  const auto nb = static_cast<size_t>(std::count(bank_mask.begin(), bank_mask.end(), true));
  const auto nc = static_cast<size_t>(std::count(col_mask.begin(), col_mask.end(), true));
  if (nb == 0 || nc == 0) throw std::invalid_argument("broadcast selects no target");
  return nb * nc;
}

void replicate(uint64_t word, const std::vector<bool>& bank_mask, const std::vector<bool>& col_mask,
               BroadcastTarget& target) {
  for (size_t b = 0; b < target.banks; ++b)
    for (size_t c = 0; c < target.columns; ++c)
      if (bank_mask[b] && col_mask[c]) target.words[b * target.columns + c] = word;
}

}  // namespace

EventTrace broadcast_write(uint64_t word, const std::vector<bool>& bank_mask, const std::vector<bool>& col_mask,
                           const SystemConfig& cfg, BroadcastTarget& target) {
  if (!cfg.periph.bu_enabled) throw BroadcastDisabled("broadcast units are disabled; use per-target writes");
  if (target.banks > static_cast<size_t>(cfg.dram.banks_per_device))
    throw std::invalid_argument("bank mask wider than banks_per_device");
  const auto width = cfg.dram.device_data_width_bits;
  if (width < 64 && (word >> width) != 0) throw std::out_of_range("word wider than device_data_width");
  fan_out(bank_mask, col_mask, target);
  replicate(word, bank_mask, col_mask, target);
  EventTrace t;
  t.record(EventKind::kBcastWord);
  return t;
}

EventTrace write_per_target(uint64_t word, const std::vector<bool>& bank_mask, const std::vector<bool>& col_mask,
                            BroadcastTarget& target) {
  const size_t n = fan_out(bank_mask, col_mask, target);
  replicate(word, bank_mask, col_mask, target);
  EventTrace t;
  t.add_count(EventKind::kBcastWord, n);
  return t;
}

}  // namespace racam
