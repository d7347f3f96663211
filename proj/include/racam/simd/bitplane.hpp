// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Word-parallel kernels over bit planes. A bit plane is one row of a
// vertically laid out operand: bit `b` of every lane, 64 lanes per uint64_t
// word, lane `c` at bit (c % 64) of word (c / 64). Padding bits beyond the
// lane count are kept at zero by every kernel.
//
// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The variant is picked once at startup from CPUID; RACAM_SIMD=scalar
// in the environment (or set_isa) forces the reference path.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace racam::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

struct BitplaneKernels {
  Isa isa;

  /// One PE step on every lane of a row:
  ///   b == 1: out = a ^ c ^ carry, carry = maj(a, c, carry)
  ///   b == 0: out = c, carry unchanged
  void (*gated_full_add)(const uint64_t* a, const uint64_t* b, const uint64_t* c, uint64_t* carry, uint64_t* out,
                         size_t words);

  /// Number of set bits across `words` words.
  uint64_t (*popcount)(const uint64_t* row, size_t words);

  /// Writes plane `bit` of `values` (one value per lane) into `plane`, which
  /// must hold ceil(values.size() / 64) words.
  void (*extract_plane)(const uint64_t* values, size_t lanes, unsigned bit, uint64_t* plane);
};

const BitplaneKernels& scalar_kernels();
/// Null when the AVX2 translation unit is not compiled in.
const BitplaneKernels* avx2_kernels();

/// Kernels for the current process-wide selection.
const BitplaneKernels& kernels();

/// Whether the CPU and build both support `isa`.
bool isa_supported(Isa isa);
std::vector<Isa> supported_isas();

/// Overrides the runtime selection. Returns false (and changes nothing) when
/// the requested ISA is unsupported.
bool set_isa(Isa isa);

}  // namespace racam::simd
