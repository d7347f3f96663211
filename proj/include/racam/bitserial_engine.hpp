// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Bit-exact functional model of the per-bank compute path: locality buffer,
// bit-serial PEs, popcount reduction unit and broadcast units. Every
// operation returns its result together with an EventTrace whose counters the
// closed-form cost model in perf_model.hpp must reproduce exactly.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "racam/arch_config.hpp"
#include "racam/bit_matrix.hpp"

namespace racam {

enum class EventKind : uint8_t {
  kArrayRowRead,
  kArrayRowWrite,
  kLbAccess,
  kPeStep,
  kPcStep,
  kAddpStep,
  kBcastWord,
};
inline constexpr size_t kEventKindCount = 7;

std::string_view event_kind_name(EventKind k);

struct Event {
  EventKind kind;
  int32_t slot = -1;  // locality-buffer row, -1 when not buffer-related
  int32_t bit = -1;   // operand/product bit significance, -1 when n/a

  bool operator==(const Event&) const = default;
};

/// Counters are always maintained; the ordered log only when enabled, and
/// only up to `log_limit` entries (`log_truncated` is set past that).
class EventTrace {
 public:
  EventTrace() = default;
  EventTrace(bool log_events, size_t log_limit) : logging_(log_events), log_limit_(log_limit) {}

  void record(EventKind k, int32_t slot = -1, int32_t bit = -1);
  void add_count(EventKind k, uint64_t n);

  uint64_t count(EventKind k) const { return counters_[static_cast<size_t>(k)]; }
  uint64_t array_row_read() const { return count(EventKind::kArrayRowRead); }
  uint64_t array_row_write() const { return count(EventKind::kArrayRowWrite); }
  uint64_t array_accesses() const { return array_row_read() + array_row_write(); }
  uint64_t lb_access() const { return count(EventKind::kLbAccess); }
  uint64_t pe_step() const { return count(EventKind::kPeStep); }
  uint64_t pc_step() const { return count(EventKind::kPcStep); }
  uint64_t addp_step() const { return count(EventKind::kAddpStep); }
  uint64_t bcast_word() const { return count(EventKind::kBcastWord); }

  bool logging() const { return logging_; }
  bool log_truncated() const { return truncated_; }
  const std::vector<Event>& log() const { return log_; }

  /// Appends `other`'s counters and log (log kept only if this trace logs).
  EventTrace& operator+=(const EventTrace& other);

  /// Counter equality; the log is ignored.
  bool same_counts(const EventTrace& other) const { return counters_ == other.counters_; }

  /// One JSON object per line: every counter, then (optionally) the event log.
  std::string to_jsonl(bool include_log) const;

 private:
  std::array<uint64_t, kEventKindCount> counters_{};
  bool logging_ = false;
  size_t log_limit_ = 0;
  bool truncated_ = false;
  std::vector<Event> log_;
};

struct PeInputs {
  bool a = false;
  bool b = false;
  bool c = false;
  bool carry_in = false;
};

struct PeOutput {
  bool out = false;
  bool carry_out = false;
  bool operator==(const PeOutput&) const = default;
};

/// Single-lane PE: a full add of `a` and `c` gated by the add-enable bit `b`.
constexpr PeOutput pe_step(PeInputs in) {
  if (!in.b) return {in.c, in.carry_in};
  const bool sum = in.a != (in.c != in.carry_in);
  const bool maj = (in.a && in.c) || (in.a && in.carry_in) || (in.c && in.carry_in);
  return {sum, maj};
}

class BufferTooSmall : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class LaneMismatch : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class AccumulatorOverflow : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class BroadcastDisabled : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Row-granular state of one bank's locality buffer. Slot assignment for an
/// n-bit reuse multiply: op1 bits in slots [0, n), the current op2 bit in slot
/// n, and a ring of n result slots in [n+1, 2n+1).
class LocalityBufferState {
 public:
  LocalityBufferState(size_t rows, size_t cols);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t words() const { return words_; }

  std::span<uint64_t> slot(size_t r);
  std::span<const uint64_t> slot(size_t r) const;
  std::span<uint64_t> carry() { return carry_; }

  void clear();

  /// Highest number of simultaneously occupied rows since the last clear().
  size_t max_live_rows() const { return max_live_; }
  void occupy(size_t r);
  void release(size_t r);

 private:
  size_t rows_;
  size_t cols_;
  size_t words_;
  std::vector<uint64_t> cells_;
  std::vector<uint64_t> carry_;
  std::vector<bool> live_;
  size_t live_count_ = 0;
  size_t max_live_ = 0;
};

struct EngineOptions {
  size_t lb_rows = 17;
  size_t lb_cols = 1024;
  unsigned popcount_width_bits = 32;
  bool lb_enabled = true;
  bool log_events = false;
  size_t log_limit = 1u << 20;

  static EngineOptions from_config(const SystemConfig& cfg);
};

struct MatrixResult {
  BitMatrix value;
  EventTrace trace;
};

struct ReduceResult {
  std::vector<uint64_t> sums;  // one per segment
  EventTrace trace;
};

struct AddParallelResult {
  int32_t value = 0;
  bool wrapped = false;
  EventTrace trace;
};

/// Target storage for broadcast writes: `banks` x `columns` words.
struct BroadcastTarget {
  size_t banks = 0;
  size_t columns = 0;
  std::vector<uint64_t> words;

  BroadcastTarget(size_t banks_, size_t columns_) : banks(banks_), columns(columns_), words(banks_ * columns_, 0) {}
  uint64_t at(size_t bank, size_t col) const { return words.at(bank * columns + col); }
};

/// One bank's functional compute path. Not thread-safe; use one instance per
/// thread.
class BitSerialEngine {
 public:
  explicit BitSerialEngine(EngineOptions opts);

  const EngineOptions& options() const { return opts_; }
  const LocalityBufferState& buffer() const { return lb_; }

  /// Reuse multiply through the locality buffer. Product has depth 2n.
  MatrixResult mul_reuse(const BitMatrix& op1, const BitMatrix& op2, unsigned n);

  /// Multiply without a locality buffer: every multiplicand bit is re-read
  /// for each multiplier bit and the partial sum is written back per round.
  MatrixResult mul_baseline(const BitMatrix& op1, const BitMatrix& op2, unsigned n);

  /// Routes to mul_reuse or mul_baseline according to lb_enabled.
  MatrixResult mul(const BitMatrix& op1, const BitMatrix& op2, unsigned n);

  /// Bit-serial add. Sum has depth n+1.
  MatrixResult add_serial(const BitMatrix& op1, const BitMatrix& op2, unsigned n);

  /// Column-wise reduction of `partials` read from the array, split into
  /// `segments` equal contiguous lane groups.
  ReduceResult popcount_reduce(const BitMatrix& partials, size_t segments = 1);

  /// Multiply fused with popcount reduction over `segments` contiguous lane
  /// groups. If `accumulate` is non-empty (one entry per segment) the
  /// popcount accumulators continue from those values.
  ReduceResult mul_red(const BitMatrix& op1, const BitMatrix& op2, unsigned n, size_t segments = 1,
                       std::span<const uint64_t> accumulate = {});

  /// Bit-parallel 32-bit add in the popcount unit's accumulator (wrapping).
  AddParallelResult add_parallel(int32_t acc, int32_t addend);

  /// Signed dot product of two n-bit two's-complement vectors, computed on
  /// the unsigned core by offsetting both operands by 2^(n-1) and correcting
  /// with the popcount sums of the offset operands.
  struct SignedDot {
    int64_t value = 0;
    EventTrace trace;
  };
  SignedDot dot_signed(std::span<const int64_t> a, std::span<const int64_t> b, unsigned n);

 private:
  EventTrace new_trace() const { return EventTrace(opts_.log_events, opts_.log_limit); }
  void check_operands(const BitMatrix& op1, const BitMatrix& op2, unsigned n, bool needs_buffer) const;
  void check_accumulator(uint64_t v) const;

  // Shared body of mul_reuse / mul_red. `sink` receives each finished
  // product bit (as a row of words) in significance order.
  template <typename Sink>
  void reuse_schedule(const BitMatrix& op1, const BitMatrix& op2, unsigned n, EventTrace& t, Sink&& sink);
  template <typename Sink>
  void baseline_schedule(const BitMatrix& op1, const BitMatrix& op2, unsigned n, EventTrace& t, Sink&& sink);

  EngineOptions opts_;
  LocalityBufferState lb_;
};

/// Replicates `word` into every selected (bank, column); one external word
/// crosses the channel. Throws BroadcastDisabled when the config has no
/// broadcast units.
EventTrace broadcast_write(uint64_t word, const std::vector<bool>& bank_mask, const std::vector<bool>& col_mask,
                           const SystemConfig& cfg, BroadcastTarget& target);

/// Fallback without broadcast units: one external word per selected target.
EventTrace write_per_target(uint64_t word, const std::vector<bool>& bank_mask, const std::vector<bool>& col_mask,
                            BroadcastTarget& target);

}  // namespace racam
