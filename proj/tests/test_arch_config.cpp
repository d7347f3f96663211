// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <string>

#include "doctest.h"
#include "racam/arch_config.hpp"

using namespace racam;

namespace {

std::string invariant_of(const SystemConfig& cfg) {
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    return e.invariant();
  }
  return "";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("full preset geometry") {
  const SystemConfig c = preset("racam_full");
  CHECK(c.dram.channels == 8);
  CHECK(c.dram.ranks_per_channel == 32);
  CHECK(c.dram.devices_per_rank == 8);
  CHECK(c.dram.banks_per_device == 16);
  CHECK(c.dram.subarrays_per_bank == 128);
  CHECK(c.dram.rows_per_subarray == 128);
  CHECK(c.dram.cols_per_subarray == 16384);
  CHECK(c.periph.pes_per_bank == 1024);
  CHECK(c.periph.lb_rows == 17);
  CHECK(c.total_pes() == int64_t{8} * 32 * 8 * 16 * 1024);
  CHECK(c.block_width() == 1024);
  CHECK(c.blocks_per_bank() == 128 * 16);
}

TEST_CASE("scaled presets shrink channels and ranks only") {
  const SystemConfig full = preset("racam_full");
  const struct {
    const char* name;
    int64_t div;
  } cases[] = {{"racam_eighth", 8}, {"racam_sixteenth", 16}, {"racam_128th", 128}};
  for (const auto& cs : cases) {
    CAPTURE(cs.name);
    const SystemConfig c = preset(cs.name);
    CHECK(c.total_pes() * cs.div == full.total_pes());
    CHECK(c.dram.devices_per_rank == full.dram.devices_per_rank);
    CHECK(c.dram.banks_per_device == full.dram.banks_per_device);
    CHECK(c.periph == full.periph);
  }
}

TEST_CASE("desk preset is the minimal legal configuration") {
  const SystemConfig c = preset("desk_small");
  CHECK(c.dram.channels == 2);
  CHECK(c.dram.ranks_per_channel == 2);
  CHECK(c.dram.devices_per_rank == 2);
  CHECK(c.dram.banks_per_device == 2);
  CHECK(c.dram.rows_per_subarray == 16);
  CHECK(c.dram.cols_per_subarray == 8);
  CHECK(c.periph.pes_per_bank == 4);
  CHECK(c.blocks_per_bank() == 4);
  CHECK_THROWS_AS(preset("racam_huge"), ConfigError);
}

TEST_CASE("all presets validate and round-trip through text") {
  for (const char* name : {"racam_full", "racam_eighth", "racam_sixteenth", "racam_128th", "desk_small"}) {
    CAPTURE(name);
    const SystemConfig c = preset(name);
    CHECK_NOTHROW(validate(c));
    CHECK(load_config(render(c)) == c);
    CHECK(config_hash(load_config(render(c))) == config_hash(c));
  }
}

TEST_CASE("shipped config files match the presets") {
  for (const char* name : {"racam_full", "desk_small"}) {
    CAPTURE(name);
    CHECK(load_config_file(std::string(RACAM_SOURCE_DIR) + "/configs/" + name + ".ini") == preset(name));
  }
}

TEST_CASE("round trip over random valid configurations") {
  std::mt19937_64 rng(7);
  auto pick = [&](int64_t lo, int64_t hi) { return std::uniform_int_distribution<int64_t>(lo, hi)(rng); };
  for (int i = 0; i < 200; ++i) {
    SystemConfig c;
    c.dram.channels = pick(1, 9);
    c.dram.ranks_per_channel = pick(1, 33);
    c.dram.devices_per_rank = pick(1, 9);
    c.dram.banks_per_device = pick(1, 17);
    c.dram.subarrays_per_bank = pick(1, 130);
    c.dram.rows_per_subarray = pick(1, 512);
    c.periph.pes_per_bank = pick(1, 64);
    c.periph.lb_cols = c.periph.pes_per_bank;
    c.dram.cols_per_subarray = c.periph.pes_per_bank * pick(1, 20);
    c.dram.device_data_width_bits = pick(6, 64);
    c.dram.bus_frequency_mhz = 1000.0 + static_cast<double>(pick(0, 4000)) / 3.0;
    c.max_precision = pick(1, 15);
    c.periph.lb_rows = 2 * c.max_precision + 1 + pick(0, 4);
    c.periph.lb_enabled = pick(0, 1) == 1;
    c.periph.pr_enabled = pick(0, 1) == 1;
    c.periph.bu_enabled = pick(0, 1) == 1;
    c.timing = default_timing(c.dram);
    c.timing.salp_overlap = static_cast<double>(pick(0, 1000)) / 1000.0;
    REQUIRE_NOTHROW(validate(c));
    CHECK(load_config(render(c)) == c);
  }
}

TEST_CASE("derived totals recompute from fields") {
  SystemConfig c = preset("desk_small");
  const int64_t before = c.total_pes();
  c.dram.channels = 3;
  CHECK(c.total_pes() == before / 2 * 3);
  CHECK(c.total_pes() ==
        c.dram.channels * c.dram.ranks_per_channel * c.dram.devices_per_rank * c.dram.banks_per_device *
            c.periph.pes_per_bank);
}

TEST_CASE("violations are reported by name") {
  SystemConfig c = preset("desk_small");
  c.periph.lb_rows = 9;
  CHECK(invariant_of(c) == "lb_rows_capacity");
  try {
    validate(c);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("locality buffer too small") != std::string::npos);
  }
  c.periph.lb_enabled = false;
  CHECK(invariant_of(c) == "");

  c = preset("desk_small");
  c.periph.lb_cols = 8;
  CHECK(invariant_of(c) == "lb_cols_match_pes");

  c = preset("desk_small");
  c.dram.cols_per_subarray = 6;
  CHECK(invariant_of(c) == "cols_multiple_of_block_width");

  c = preset("desk_small");
  c.timing.salp_overlap = 1.5;
  CHECK(invariant_of(c) == "salp_overlap_range");

  c = preset("desk_small");
  c.timing.t_pe_ns = 0;
  CHECK(invariant_of(c) == "positive_durations");

  c = preset("desk_small");
  c.dram.banks_per_device = 0;
  CHECK(invariant_of(c) == "positive_counts");
}

TEST_CASE("hierarchy counts need not be powers of two") {
  SystemConfig c = preset("desk_small");
  c.dram.channels = 3;
  c.dram.ranks_per_channel = 5;
  c.dram.subarrays_per_bank = 7;
  CHECK_NOTHROW(validate(c));
  CHECK(c.blocks_per_bank() == 14);
}

TEST_CASE("missing keys and bad values are rejected") {
  const std::string text = render(preset("desk_small"));
  try {
    load_config(replace(text, "t_rcd_ns = 16\n", ""));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.invariant() == "missing_key");
    CHECK(std::string(e.what()).find("t_rcd_ns") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config(replace(text, "channels = 2", "channels = two")), ConfigError);
  CHECK_THROWS_AS(load_config(replace(text, "lb_enabled = true", "lb_enabled = maybe")), ConfigError);
  CHECK_THROWS_AS(load_config(replace(text, "[timing]", "")), ConfigError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/racam.ini"), ConfigError);
}

TEST_CASE("default timing follows the bus clock") {
  const SystemConfig c = preset("racam_full");
  CHECK(c.timing.t_rcd_ns == 16.0);
  CHECK(c.timing.t_rp_ns == 16.0);
  CHECK(c.timing.t_pe_ns == doctest::Approx(1000.0 / 2400.0).epsilon(1e-15));
  CHECK(c.timing.t_addp_ns == doctest::Approx(4000.0 / 2400.0).epsilon(1e-15));
  CHECK(c.timing.salp_overlap == 0.5);
  CHECK(c.timing.array_access_ns() == 16.0);
}

TEST_CASE("config hash separates unit flags") {
  SystemConfig a = preset("racam_full");
  SystemConfig b = a;
  b.periph.pr_enabled = false;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(hash_hex(config_hash(a)).size() == 16);
}
