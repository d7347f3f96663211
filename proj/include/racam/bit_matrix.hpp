// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace racam {

/// Operand storage in vertical layout: row `b` holds bit `b` of every lane.
/// Rows are packed 64 lanes per word; bits past `lanes()` stay zero.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(size_t lanes, size_t depth);

  size_t lanes() const { return lanes_; }
  size_t depth() const { return depth_; }
  size_t words_per_row() const { return words_; }

  bool bit(size_t b, size_t c) const;
  void set_bit(size_t b, size_t c, bool v);

  std::span<const uint64_t> row(size_t b) const;
  std::span<uint64_t> row(size_t b);

  /// Integer held by lane `c` (depth <= 64).
  uint64_t lane_value(size_t c) const;
  std::vector<uint64_t> lane_values() const;

  bool operator==(const BitMatrix&) const = default;

 private:
  size_t lanes_ = 0;
  size_t depth_ = 0;
  size_t words_ = 0;
  std::vector<uint64_t> bits_;
};

/// Vertical transposition of `values` at `n` bits. Throws std::out_of_range
/// if any value needs more than `n` bits, std::invalid_argument if n is 0 or
/// above 64.
BitMatrix transpose_to_vertical(std::span<const uint64_t> values, unsigned n);

}  // namespace racam
