// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>

#include "racam/simd/bitplane.hpp"

namespace racam::simd {
namespace {

void gated_full_add_scalar(const uint64_t* a, const uint64_t* b, const uint64_t* c, uint64_t* carry, uint64_t* out,
                           size_t words) {
  for (size_t i = 0; i < words; ++i) {
    const uint64_t sum = a[i] ^ c[i] ^ carry[i];
    const uint64_t maj = (a[i] & c[i]) | (a[i] & carry[i]) | (c[i] & carry[i]);
    out[i] = (sum & b[i]) | (c[i] & ~b[i]);
    carry[i] = (maj & b[i]) | (carry[i] & ~b[i]);
  }
}

uint64_t popcount_scalar(const uint64_t* row, size_t words) {
  uint64_t n = 0;
  for (size_t i = 0; i < words; ++i) n += static_cast<uint64_t>(std::popcount(row[i]));
  return n;
}

void extract_plane_scalar(const uint64_t* values, size_t lanes, unsigned bit, uint64_t* plane) {
  const size_t words = (lanes + 63) / 64;
  for (size_t w = 0; w < words; ++w) plane[w] = 0;
  for (size_t c = 0; c < lanes; ++c) plane[c / 64] |= ((values[c] >> bit) & 1u) << (c % 64);
}

constexpr BitplaneKernels kScalar{Isa::kScalar, gated_full_add_scalar, popcount_scalar, extract_plane_scalar};

}  // namespace

const BitplaneKernels& scalar_kernels() { return kScalar; }

}  // namespace racam::simd
