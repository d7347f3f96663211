// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "racam/bit_matrix.hpp"

#include <string>

#include "racam/simd/bitplane.hpp"

namespace racam {

BitMatrix::BitMatrix(size_t lanes, size_t depth)
    : lanes_(lanes), depth_(depth), words_((lanes + 63) / 64), bits_(words_ * depth, 0) {
  if (depth == 0) throw std::invalid_argument("BitMatrix depth must be >= 1");
}

bool BitMatrix::bit(size_t b, size_t c) const {
  if (b >= depth_ || c >= lanes_) throw std::out_of_range("BitMatrix::bit index out of range");
  return (bits_[b * words_ + c / 64] >> (c % 64)) & 1u;
}

void BitMatrix::set_bit(size_t b, size_t c, bool v) {
  if (b >= depth_ || c >= lanes_) throw std::out_of_range("BitMatrix::set_bit index out of range");
  uint64_t& w = bits_[b * words_ + c / 64];
  const uint64_t m = uint64_t{1} << (c % 64);
  w = v ? (w | m) : (w & ~m);
}

std::span<const uint64_t> BitMatrix::row(size_t b) const {
  if (b >= depth_) throw std::out_of_range("BitMatrix::row out of range");
  return {bits_.data() + b * words_, words_};
}

std::span<uint64_t> BitMatrix::row(size_t b) {
  if (b >= depth_) throw std::out_of_range("BitMatrix::row out of range");
  return {bits_.data() + b * words_, words_};
}

uint64_t BitMatrix::lane_value(size_t c) const {
  if (c >= lanes_) throw std::out_of_range("BitMatrix::lane_value lane out of range");
  if (depth_ > 64) throw std::out_of_range("BitMatrix::lane_value depth exceeds 64 bits");
  uint64_t v = 0;
  for (size_t b = 0; b < depth_; ++b) v |= ((bits_[b * words_ + c / 64] >> (c % 64)) & 1u) << b;
  return v;
}

std::vector<uint64_t> BitMatrix::lane_values() const {
  std::vector<uint64_t> out(lanes_);
  for (size_t c = 0; c < lanes_; ++c) out[c] = lane_value(c);
  return out;
}

BitMatrix transpose_to_vertical(std::span<const uint64_t> values, unsigned n) {
  if (n == 0 || n > 64) throw std::invalid_argument("transpose_to_vertical: n must be in [1, 64]");
  if (n < 64) {
    for (size_t c = 0; c < values.size(); ++c)
      if (values[c] >> n)
        throw std::out_of_range("transpose_to_vertical: value " + std::to_string(values[c]) + " in lane " +
                                std::to_string(c) + " does not fit in " + std::to_string(n) + " bits");
  }
  BitMatrix m(values.size(), n);
  const auto& k = simd::kernels();
  for (unsigned b = 0; b < n; ++b) k.extract_plane(values.data(), values.size(), b, m.row(b).data());
  return m;
}

}  // namespace racam
