// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "racam/bitserial_engine.hpp"
#include "racam/simd/bitplane.hpp"

using namespace racam;
using namespace racam::simd;

namespace {

std::vector<uint64_t> random_words(std::mt19937_64& rng, size_t n) {
  std::vector<uint64_t> v(n);
  for (auto& w : v) w = rng();
  return v;
}

// Restores the process-wide selection when a test case ends.
struct IsaGuard {
  Isa saved = kernels().isa;
  ~IsaGuard() { set_isa(saved); }
};

}  // namespace

TEST_CASE("environment override selects the reference path") {
  const char* env = std::getenv("RACAM_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) CHECK(kernels().isa == Isa::kScalar);
  CHECK(isa_supported(Isa::kScalar));
  CHECK(isa_name(Isa::kScalar) == "scalar");
  CHECK(isa_name(Isa::kAvx2) == "avx2");
}

TEST_CASE("scalar kernels against per-bit reference") {
  const BitplaneKernels& k = scalar_kernels();
  std::mt19937_64 rng(1);
  const size_t words = 3;
  const auto a = random_words(rng, words), b = random_words(rng, words), c = random_words(rng, words);
  auto carry = random_words(rng, words);
  const auto carry0 = carry;
  std::vector<uint64_t> out(words);
  k.gated_full_add(a.data(), b.data(), c.data(), carry.data(), out.data(), words);
  for (size_t i = 0; i < words * 64; ++i) {
    auto bit = [&](const std::vector<uint64_t>& v) { return ((v[i / 64] >> (i % 64)) & 1) != 0; };
    const PeOutput want = pe_step({bit(a), bit(b), bit(c), bit(carry0)});
    REQUIRE(bit(out) == want.out);
    REQUIRE(bit(carry) == want.carry_out);
  }

  uint64_t pc = 0;
  for (uint64_t w : a)
    for (int i = 0; i < 64; ++i) pc += (w >> i) & 1;
  CHECK(k.popcount(a.data(), words) == pc);

  std::vector<uint64_t> vals(130);
  for (auto& v : vals) v = rng() & 0xFF;
  std::vector<uint64_t> plane(3, ~uint64_t{0});
  k.extract_plane(vals.data(), vals.size(), 5, plane.data());
  for (size_t i = 0; i < 130; ++i) CHECK(((plane[i / 64] >> (i % 64)) & 1) == ((vals[i] >> 5) & 1));
  CHECK((plane[2] >> 2) == 0);
}

TEST_CASE("every supported variant matches the scalar reference") {
  const BitplaneKernels& ref = scalar_kernels();
  for (Isa isa : supported_isas()) {
    CAPTURE(isa_name(isa));
    const BitplaneKernels* k = isa == Isa::kAvx2 ? avx2_kernels() : &scalar_kernels();
    REQUIRE(k != nullptr);
    std::mt19937_64 rng(42);
    for (size_t words : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 16u, 17u, 33u}) {
      CAPTURE(words);
      for (int t = 0; t < 20; ++t) {
        const auto a = random_words(rng, words), b = random_words(rng, words), c = random_words(rng, words);
        auto c1 = random_words(rng, words);
        auto c2 = c1;
        std::vector<uint64_t> o1(words), o2(words);
        ref.gated_full_add(a.data(), b.data(), c.data(), c1.data(), o1.data(), words);
        k->gated_full_add(a.data(), b.data(), c.data(), c2.data(), o2.data(), words);
        REQUIRE(o1 == o2);
        REQUIRE(c1 == c2);
        REQUIRE(ref.popcount(a.data(), words) == k->popcount(a.data(), words));
      }
    }
    for (size_t lanes : {1u, 31u, 64u, 100u, 256u, 257u, 1024u, 1031u}) {
      std::vector<uint64_t> vals(lanes);
      for (auto& v : vals) v = rng();
      for (unsigned bit : {0u, 7u, 31u, 63u}) {
        std::vector<uint64_t> p1((lanes + 63) / 64, 0), p2((lanes + 63) / 64, ~uint64_t{0});
        ref.extract_plane(vals.data(), lanes, bit, p1.data());
        k->extract_plane(vals.data(), lanes, bit, p2.data());
        REQUIRE(p1 == p2);
      }
    }
  }
}

TEST_CASE("engine results do not depend on the selected variant") {
  IsaGuard guard;
  std::mt19937_64 rng(8);
  std::vector<uint64_t> a(1024), b(1024);
  for (size_t i = 0; i < 1024; ++i) a[i] = rng() & 0xFF, b[i] = rng() & 0xFF;
  std::vector<std::vector<uint64_t>> products;
  std::vector<uint64_t> dots;
  for (Isa isa : supported_isas()) {
    REQUIRE(set_isa(isa));
    EngineOptions o;
    o.lb_cols = 1024;
    BitSerialEngine e(o);
    const auto A = transpose_to_vertical(a, 8), B = transpose_to_vertical(b, 8);
    products.push_back(e.mul_reuse(A, B, 8).value.lane_values());
    dots.push_back(e.mul_red(A, B, 8).sums.at(0));
  }
  for (size_t i = 1; i < products.size(); ++i) {
    CHECK(products[i] == products[0]);
    CHECK(dots[i] == dots[0]);
  }
}

TEST_CASE("unsupported selection changes nothing") {
  IsaGuard guard;
  const Isa before = kernels().isa;
  if (!isa_supported(Isa::kAvx2)) {
    CHECK_FALSE(set_isa(Isa::kAvx2));
    CHECK(kernels().isa == before);
  } else {
    CHECK(set_isa(Isa::kScalar));
    CHECK(kernels().isa == Isa::kScalar);
  }
}
