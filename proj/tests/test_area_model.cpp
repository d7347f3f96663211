// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <string>

#include "doctest.h"
#include "racam/area_model.hpp"

using namespace racam;

namespace {

AreaParams neutral() {
  AreaParams p = default_area_params();
  p.buffer_growth = 0;
  p.placement_utilization = 1;
  p.routing_capacity = 1;
  return p;
}

}  // namespace

TEST_CASE("shipped calibration loads") {
  const AreaParams p = default_area_params();
  CHECK(p.pe_area_um2 == 140);
  CHECK(p.placement_utilization == 0.7);
  CHECK(p.buffer_growth == 0.15);
  CHECK_NOTHROW(validate(p));
}

TEST_CASE("dram area is linear in storage") {
  const AreaParams p = default_area_params();
  SystemConfig c = preset("racam_full");
  const double a = dram_area_mm2(c, p);
  CHECK(a == doctest::Approx(8.0 * 32 * 8 * 16 * 128 * 128 * 16384 / p.dram_bit_density_bits_per_mm2));
  c.dram.rows_per_subarray *= 2;
  CHECK(dram_area_mm2(c, p) == doctest::Approx(2 * a));
}

TEST_CASE("peripheral area with neutral factors") {
  const AreaParams p = neutral();
  const SystemConfig c = preset("racam_full");
  const double banks = static_cast<double>(c.total_banks());
  const double logic =
      (p.pe_area_um2 * static_cast<double>(c.total_pes()) + (p.popcount_unit_area_um2 + p.broadcast_unit_area_um2) * banks) *
      1e-6 * p.node_scale;
  const double sram = banks * 17 * 1024 / p.sram_bit_density_bits_per_mm2;
  CHECK(logic_area_mm2(c, p) == doctest::Approx(logic).epsilon(1e-12));
  CHECK(locality_buffer_area_mm2(c, p) == doctest::Approx(sram).epsilon(1e-12));
  CHECK(peripheral_area_mm2(c, p) == doctest::Approx(logic + sram).epsilon(1e-12));

  const AreaParams d = default_area_params();
  CHECK(logic_area_mm2(c, d) == doctest::Approx(logic * 1.15 / 0.7).epsilon(1e-12));
}

TEST_CASE("overhead near four percent at full scale") {
  const double f = overhead_fraction(preset("racam_full"), default_area_params());
  CHECK(f >= 0.02);
  CHECK(f <= 0.06);
  CHECK(overhead_fraction(preset("racam_full"), default_area_params()) == f);
}

TEST_CASE("halving PEs halves the PE and buffer terms") {
  const AreaParams p = default_area_params();
  SystemConfig c = preset("racam_full");
  SystemConfig h = c;
  h.periph.pes_per_bank = 512;
  h.periph.lb_cols = 512;
  CHECK(locality_buffer_area_mm2(h, p) == doctest::Approx(locality_buffer_area_mm2(c, p) / 2));
  const double per_bank_units = (p.popcount_unit_area_um2 + p.broadcast_unit_area_um2) *
                                static_cast<double>(c.total_banks()) * 1e-6 * p.node_scale * 1.15 / 0.7;
  CHECK(logic_area_mm2(h, p) - per_bank_units ==
        doctest::Approx((logic_area_mm2(c, p) - per_bank_units) / 2).epsilon(1e-9));
}

TEST_CASE("fraction grows with every peripheral count") {
  const AreaParams p = default_area_params();
  const SystemConfig c = preset("racam_full");
  const double base = overhead_fraction(c, p);
  SystemConfig x = c;
  x.periph.pes_per_bank = x.periph.lb_cols = 2048;
  x.dram.cols_per_subarray = 16384;
  CHECK(overhead_fraction(x, p) > base);
  x = c;
  x.periph.lb_rows = 33;
  CHECK(overhead_fraction(x, p) > base);
  AreaParams q = p;
  q.popcount_unit_area_um2 *= 2;
  CHECK(overhead_fraction(c, q) > base);
  q = p;
  q.broadcast_unit_area_um2 *= 2;
  CHECK(overhead_fraction(c, q) > base);
  for (const char* name : {"racam_full", "racam_eighth", "desk_small"}) {
    CAPTURE(name);
    CHECK(dram_area_mm2(preset(name), p) > 0);
    CHECK(peripheral_area_mm2(preset(name), p) > 0);
  }
}

TEST_CASE("bad calibrations are rejected") {
  AreaParams p = default_area_params();
  p.placement_utilization = 0;
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = default_area_params();
  p.buffer_growth = -0.1;
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = default_area_params();
  p.dram_bit_density_bits_per_mm2 = 0;
  CHECK_THROWS_AS(validate(p), ConfigError);
  CHECK_THROWS_AS(load_area_params("[area]\npe_area_um2 = 1\n"), ConfigError);
  CHECK_THROWS_AS(load_area_params("[other]\n"), ConfigError);
}
