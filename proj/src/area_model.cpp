// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "racam/area_model.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace racam {

namespace pt = boost::property_tree;

void validate(const AreaParams& p) {
  if (!(p.dram_bit_density_bits_per_mm2 > 0) || !(p.sram_bit_density_bits_per_mm2 > 0))
    throw ConfigError("area_density", "bit densities must be > 0");
  if (!(p.pe_area_um2 > 0) || !(p.popcount_unit_area_um2 > 0) || !(p.broadcast_unit_area_um2 > 0) ||
      !(p.node_scale > 0))
    throw ConfigError("area_units", "unit areas and node_scale must be > 0");
  if (!(p.placement_utilization > 0) || p.placement_utilization > 1)
    throw ConfigError("area_utilization", "placement_utilization must be in (0, 1]");
  if (!(p.buffer_growth >= 0)) throw ConfigError("area_buffer_growth", "buffer_growth must be >= 0");
  if (!(p.routing_capacity > 0)) throw ConfigError("area_routing", "routing_capacity must be > 0");
}

AreaParams load_area_params(std::string_view source) {
  pt::ptree root;
  std::istringstream in{std::string(source)};
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("parse", std::string("area config does not parse: ") + e.message());
  }
  const auto sec = root.get_child_optional("area");
  if (!sec) throw ConfigError("missing_key", "missing [area] section");
  auto get = [&](const char* key) {
    const auto v = sec->get_optional<double>(key);
    if (!v) throw ConfigError("missing_key", std::string("missing or non-numeric [area] ") + key);
    return *v;
  };
  AreaParams p;
  p.dram_bit_density_bits_per_mm2 = get("dram_bit_density_bits_per_mm2");
  p.sram_bit_density_bits_per_mm2 = get("sram_bit_density_bits_per_mm2");
  p.pe_area_um2 = get("pe_area_um2");
  p.popcount_unit_area_um2 = get("popcount_unit_area_um2");
  p.broadcast_unit_area_um2 = get("broadcast_unit_area_um2");
  p.node_scale = get("node_scale");
  p.placement_utilization = get("placement_utilization");
  p.buffer_growth = get("buffer_growth");
  p.routing_capacity = get("routing_capacity");
  validate(p);
  return p;
}

AreaParams load_area_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("io", "cannot open area config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_area_params(ss.str());
}

AreaParams default_area_params() { return load_area_params_file(std::string(RACAM_CONFIG_DIR) + "/area_defaults.ini"); }

double dram_area_mm2(const SystemConfig& cfg, const AreaParams& p) {
  return cfg.total_bits() / p.dram_bit_density_bits_per_mm2;
}

double locality_buffer_area_mm2(const SystemConfig& cfg, const AreaParams& p) {
  const double bits = static_cast<double>(cfg.periph.lb_rows) * static_cast<double>(cfg.periph.lb_cols) *
                      static_cast<double>(cfg.total_banks());
  return bits / p.sram_bit_density_bits_per_mm2;
}

double logic_area_mm2(const SystemConfig& cfg, const AreaParams& p) {
  const double banks = static_cast<double>(cfg.total_banks());
  const double synth_um2 = p.pe_area_um2 * static_cast<double>(cfg.total_pes()) +
                           (p.popcount_unit_area_um2 + p.broadcast_unit_area_um2) * banks;
  return synth_um2 * 1e-6 * p.node_scale * (1.0 + p.buffer_growth) /
         (p.placement_utilization * p.routing_capacity);
}

double peripheral_area_mm2(const SystemConfig& cfg, const AreaParams& p) {
  return logic_area_mm2(cfg, p) + locality_buffer_area_mm2(cfg, p);
}

double overhead_fraction(const SystemConfig& cfg, const AreaParams& p) {
  return peripheral_area_mm2(cfg, p) / dram_area_mm2(cfg, p);
}

}  // namespace racam
