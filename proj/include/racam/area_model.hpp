// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "racam/arch_config.hpp"

namespace racam {

/// Area calibration. Synthesis areas are per unit at the reference node;
/// `node_scale` maps them to the DRAM process.
struct AreaParams {
  double dram_bit_density_bits_per_mm2 = 0;
  double sram_bit_density_bits_per_mm2 = 0;
  double pe_area_um2 = 0;              // one bit-serial PE
  double popcount_unit_area_um2 = 0;   // one per bank
  double broadcast_unit_area_um2 = 0;  // one per bank
  double node_scale = 1;
  double placement_utilization = 1;    // U
  double buffer_growth = 0;            // beta
  double routing_capacity = 1;         // C

  bool operator==(const AreaParams&) const = default;
};

void validate(const AreaParams& p);

/// [area] section of an INI document; every key is required.
AreaParams load_area_params(std::string_view source);
AreaParams load_area_params_file(const std::string& path);
/// The calibration shipped in configs/area_defaults.ini.
AreaParams default_area_params();

double dram_area_mm2(const SystemConfig& cfg, const AreaParams& p);
double locality_buffer_area_mm2(const SystemConfig& cfg, const AreaParams& p);
double logic_area_mm2(const SystemConfig& cfg, const AreaParams& p);
double peripheral_area_mm2(const SystemConfig& cfg, const AreaParams& p);
double overhead_fraction(const SystemConfig& cfg, const AreaParams& p);

}  // namespace racam
