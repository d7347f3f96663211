// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Built with -mavx2 -mpopcnt. Nothing here may run unless the dispatcher has
// confirmed AVX2 support through CPUID.

#include <immintrin.h>

#include "racam/simd/bitplane.hpp"

namespace racam::simd {
namespace {

void gated_full_add_avx2(const uint64_t* a, const uint64_t* b, const uint64_t* c, uint64_t* carry, uint64_t* out,
                         size_t words) {
  size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const __m256i vc = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(c + i));
    const __m256i vk = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(carry + i));
    const __m256i sum = _mm256_xor_si256(_mm256_xor_si256(va, vc), vk);
    const __m256i maj =
        _mm256_or_si256(_mm256_and_si256(va, vc), _mm256_and_si256(vk, _mm256_or_si256(va, vc)));
    // andnot(x, y) = ~x & y
    const __m256i o = _mm256_or_si256(_mm256_and_si256(sum, vb), _mm256_andnot_si256(vb, vc));
    const __m256i k = _mm256_or_si256(_mm256_and_si256(maj, vb), _mm256_andnot_si256(vb, vk));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), o);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(carry + i), k);
  }
  for (; i < words; ++i) {
    const uint64_t sum = a[i] ^ c[i] ^ carry[i];
    const uint64_t maj = (a[i] & c[i]) | (carry[i] & (a[i] | c[i]));
    out[i] = (sum & b[i]) | (c[i] & ~b[i]);
    carry[i] = (maj & b[i]) | (carry[i] & ~b[i]);
  }
}

// Nibble-table popcount (Mula et al.) with a horizontal sum through SAD.
uint64_t popcount_avx2(const uint64_t* row, size_t words) {
  const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4, 0, 1, 1, 2, 1, 2, 2, 3, 1, 2,
                                       2, 3, 2, 3, 3, 4);
  const __m256i low = _mm256_set1_epi8(0x0f);
  __m256i acc = _mm256_setzero_si256();
  size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(row + i));
    const __m256i lo = _mm256_and_si256(v, low);
    const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low);
    const __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(cnt, _mm256_setzero_si256()));
  }
  uint64_t n = static_cast<uint64_t>(_mm256_extract_epi64(acc, 0)) + static_cast<uint64_t>(_mm256_extract_epi64(acc, 1)) +
               static_cast<uint64_t>(_mm256_extract_epi64(acc, 2)) + static_cast<uint64_t>(_mm256_extract_epi64(acc, 3));
  for (; i < words; ++i) n += static_cast<uint64_t>(_mm_popcnt_u64(row[i]));
  return n;
}

// Moves bit `bit` of four lanes into the sign position and collects them with
// movemask, four lanes per instruction.
void extract_plane_avx2(const uint64_t* values, size_t lanes, unsigned bit, uint64_t* plane) {
  const size_t words = (lanes + 63) / 64;
  const __m128i shift = _mm_cvtsi32_si128(static_cast<int>(63 - bit));
  for (size_t w = 0; w < words; ++w) {
    const size_t base = w * 64;
    const size_t n = lanes - base < 64 ? lanes - base : 64;
    uint64_t word = 0;
    size_t c = 0;
    for (; c + 4 <= n; c += 4) {
      const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(values + base + c));
      const __m256i s = _mm256_sll_epi64(v, shift);
      const auto m = static_cast<uint64_t>(_mm256_movemask_pd(_mm256_castsi256_pd(s)));
      word |= m << c;
    }
    for (; c < n; ++c) word |= ((values[base + c] >> bit) & 1u) << c;
    plane[w] = word;
  }
}

constexpr BitplaneKernels kAvx2{Isa::kAvx2, gated_full_add_avx2, popcount_avx2, extract_plane_avx2};

}  // namespace

const BitplaneKernels* avx2_kernels_impl() { return &kAvx2; }

}  // namespace racam::simd
