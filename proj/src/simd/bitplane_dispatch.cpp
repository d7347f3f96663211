// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string>

#include "racam/simd/bitplane.hpp"

namespace racam::simd {

#if defined(RACAM_HAVE_AVX2_TU)
const BitplaneKernels* avx2_kernels_impl();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(RACAM_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
#else
  return false;
#endif
}

const BitplaneKernels* initial_selection() {
  const char* env = std::getenv("RACAM_SIMD");
  if (env != nullptr && std::string(env) == "scalar") return &scalar_kernels();
  if (const BitplaneKernels* k = avx2_kernels(); k != nullptr && cpu_has_avx2()) return k;
  return &scalar_kernels();
}

std::atomic<const BitplaneKernels*>& selected() {
  static std::atomic<const BitplaneKernels*> k{initial_selection()};
  return k;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

const BitplaneKernels* avx2_kernels() {
#if defined(RACAM_HAVE_AVX2_TU)
  return avx2_kernels_impl();
#else
  return nullptr;
#endif
}

const BitplaneKernels& kernels() { return *selected().load(std::memory_order_relaxed); }

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
      return avx2_kernels() != nullptr && cpu_has_avx2();
  }
  return false;
}

std::vector<Isa> supported_isas() {
  std::vector<Isa> out{Isa::kScalar};
  if (isa_supported(Isa::kAvx2)) out.push_back(Isa::kAvx2);
  return out;
}

bool set_isa(Isa isa) {
  if (!isa_supported(isa)) return false;
  selected().store(isa == Isa::kAvx2 ? avx2_kernels() : &scalar_kernels(), std::memory_order_relaxed);
  return true;
}

}  // namespace racam::simd
