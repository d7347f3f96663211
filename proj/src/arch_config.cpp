// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "racam/arch_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace racam {
namespace {

namespace pt = boost::property_tree;

void require(bool ok, const char* invariant, const std::string& what) {
  if (!ok) throw ConfigError(invariant, std::string(invariant) + ": " + what);
}

const pt::ptree& section(const pt::ptree& root, const char* name) {
  auto it = root.find(name);
  if (it == root.not_found()) throw ConfigError("missing_key", std::string("missing section [") + name + "]");
  return it->second;
}

std::string raw_value(const pt::ptree& sec, const char* sec_name, const char* key) {
  auto v = sec.get_optional<std::string>(key);
  if (!v) throw ConfigError("missing_key", std::string("missing key ") + sec_name + "." + key);
  return *v;
}

int64_t get_int(const pt::ptree& sec, const char* sec_name, const char* key) {
  std::string s = raw_value(sec, sec_name, key);
  int64_t out = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ConfigError("parse", std::string("not an integer: ") + sec_name + "." + key + " = " + s);
  return out;
}

double get_double(const pt::ptree& sec, const char* sec_name, const char* key) {
  std::string s = raw_value(sec, sec_name, key);
  double out = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ConfigError("parse", std::string("not a number: ") + sec_name + "." + key + " = " + s);
  return out;
}

bool get_bool(const pt::ptree& sec, const char* sec_name, const char* key) {
  std::string s = raw_value(sec, sec_name, key);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("parse", std::string("not a flag: ") + sec_name + "." + key + " = " + s);
}

std::string fmt_double(double v) {
  // Shortest text that parses back to the same double.
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace

void validate(const SystemConfig& cfg) {
  const auto& d = cfg.dram;
  const auto& p = cfg.periph;
  const auto& t = cfg.timing;
  require(d.channels >= 1 && d.ranks_per_channel >= 1 && d.devices_per_rank >= 1 && d.banks_per_device >= 1 &&
              d.subarrays_per_bank >= 1 && d.rows_per_subarray >= 1 && d.cols_per_subarray >= 1,
          "positive_counts", "every hierarchy count must be >= 1");
  require(d.device_data_width_bits >= 1 && d.device_data_width_bits <= 64, "device_data_width",
          "device_data_width_bits must be in [1, 64]");
  require(d.bus_frequency_mhz > 0, "bus_frequency", "bus_frequency_mhz must be > 0");
  require(d.global_bitline_width_bits >= 1, "positive_counts", "global_bitline_width_bits must be >= 1");
  require(p.pes_per_bank >= 1 && p.lb_rows >= 1 && p.popcount_width_bits >= 1 && p.broadcast_bank_width_bits >= 1,
          "positive_counts", "peripheral counts must be >= 1");
  require(p.popcount_width_bits <= 64, "popcount_width", "popcount_width_bits must be <= 64");
  require(p.lb_cols == p.pes_per_bank, "lb_cols_match_pes", "lb_cols must equal pes_per_bank");
  require(d.cols_per_subarray % cfg.block_width() == 0, "cols_multiple_of_block_width",
          "cols_per_subarray must be a positive multiple of the block width (pes_per_bank)");
  require(cfg.max_precision >= 1 && cfg.max_precision <= 15, "max_precision_range",
          "max_precision must fit the 4-bit precision field (1..15)");
  if (p.lb_enabled)
    require(p.lb_rows >= 2 * cfg.max_precision + 1, "lb_rows_capacity",
            "locality buffer too small: need 2*max_precision+1 = " + std::to_string(2 * cfg.max_precision + 1) +
                " rows, have " + std::to_string(p.lb_rows));
  require(t.t_rcd_ns > 0 && t.t_rp_ns > 0 && t.t_pe_ns > 0 && t.t_lb_ns > 0 && t.t_pc_ns > 0 && t.t_addp_ns > 0 &&
              t.channel_bandwidth_bytes_per_s > 0,
          "positive_durations", "all durations and the channel bandwidth must be > 0");
  require(t.salp_overlap >= 0.0 && t.salp_overlap <= 1.0, "salp_overlap_range", "salp_overlap must be in [0, 1]");
}

SystemConfig load_config(std::string_view source) {
  pt::ptree root;
  std::istringstream in{std::string(source)};
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("parse", std::string("config does not parse: ") + e.message());
  }
  const auto& dram = section(root, "dram");
  const auto& per = section(root, "peripherals");
  const auto& tim = section(root, "timing");

  SystemConfig cfg;
  cfg.dram.channels = get_int(dram, "dram", "channels");
  cfg.dram.ranks_per_channel = get_int(dram, "dram", "ranks_per_channel");
  cfg.dram.devices_per_rank = get_int(dram, "dram", "devices_per_rank");
  cfg.dram.banks_per_device = get_int(dram, "dram", "banks_per_device");
  cfg.dram.subarrays_per_bank = get_int(dram, "dram", "subarrays_per_bank");
  cfg.dram.rows_per_subarray = get_int(dram, "dram", "rows_per_subarray");
  cfg.dram.cols_per_subarray = get_int(dram, "dram", "cols_per_subarray");
  cfg.dram.device_data_width_bits = get_int(dram, "dram", "device_data_width_bits");
  cfg.dram.bus_frequency_mhz = get_double(dram, "dram", "bus_frequency_mhz");
  cfg.dram.global_bitline_width_bits = get_int(dram, "dram", "global_bitline_width_bits");

  cfg.periph.pes_per_bank = get_int(per, "peripherals", "pes_per_bank");
  cfg.periph.lb_rows = get_int(per, "peripherals", "lb_rows");
  cfg.periph.lb_cols = get_int(per, "peripherals", "lb_cols");
  cfg.periph.popcount_width_bits = get_int(per, "peripherals", "popcount_width_bits");
  cfg.periph.broadcast_bank_width_bits = get_int(per, "peripherals", "broadcast_bank_width_bits");
  cfg.periph.lb_enabled = get_bool(per, "peripherals", "lb_enabled");
  cfg.periph.pr_enabled = get_bool(per, "peripherals", "pr_enabled");
  cfg.periph.bu_enabled = get_bool(per, "peripherals", "bu_enabled");
  cfg.max_precision = get_int(per, "peripherals", "max_precision_bits");

  cfg.timing.t_rcd_ns = get_double(tim, "timing", "t_rcd_ns");
  cfg.timing.t_rp_ns = get_double(tim, "timing", "t_rp_ns");
  cfg.timing.t_pe_ns = get_double(tim, "timing", "t_pe_ns");
  cfg.timing.t_lb_ns = get_double(tim, "timing", "t_lb_ns");
  cfg.timing.t_pc_ns = get_double(tim, "timing", "t_pc_ns");
  cfg.timing.t_addp_ns = get_double(tim, "timing", "t_addp_ns");
  cfg.timing.salp_overlap = get_double(tim, "timing", "salp_overlap");
  cfg.timing.channel_bandwidth_bytes_per_s = get_double(tim, "timing", "channel_bandwidth_bytes_per_s");

  validate(cfg);
  return cfg;
}

SystemConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("io", "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

std::string render(const SystemConfig& cfg) {
  std::ostringstream o;
  const auto& d = cfg.dram;
  const auto& p = cfg.periph;
  const auto& t = cfg.timing;
  auto flag = [](bool b) { return b ? "true" : "false"; };
  o << "[dram]\n"
    << "channels = " << d.channels << "\n"
    << "ranks_per_channel = " << d.ranks_per_channel << "\n"
    << "devices_per_rank = " << d.devices_per_rank << "\n"
    << "banks_per_device = " << d.banks_per_device << "\n"
    << "subarrays_per_bank = " << d.subarrays_per_bank << "\n"
    << "rows_per_subarray = " << d.rows_per_subarray << "\n"
    << "cols_per_subarray = " << d.cols_per_subarray << "\n"
    << "device_data_width_bits = " << d.device_data_width_bits << "\n"
    << "bus_frequency_mhz = " << fmt_double(d.bus_frequency_mhz) << "\n"
    << "global_bitline_width_bits = " << d.global_bitline_width_bits << "\n"
    << "\n[peripherals]\n"
    << "pes_per_bank = " << p.pes_per_bank << "\n"
    << "lb_rows = " << p.lb_rows << "\n"
    << "lb_cols = " << p.lb_cols << "\n"
    << "popcount_width_bits = " << p.popcount_width_bits << "\n"
    << "broadcast_bank_width_bits = " << p.broadcast_bank_width_bits << "\n"
    << "lb_enabled = " << flag(p.lb_enabled) << "\n"
    << "pr_enabled = " << flag(p.pr_enabled) << "\n"
    << "bu_enabled = " << flag(p.bu_enabled) << "\n"
    << "max_precision_bits = " << cfg.max_precision << "\n"
    << "\n[timing]\n"
    << "t_rcd_ns = " << fmt_double(t.t_rcd_ns) << "\n"
    << "t_rp_ns = " << fmt_double(t.t_rp_ns) << "\n"
    << "t_pe_ns = " << fmt_double(t.t_pe_ns) << "\n"
    << "t_lb_ns = " << fmt_double(t.t_lb_ns) << "\n"
    << "t_pc_ns = " << fmt_double(t.t_pc_ns) << "\n"
    << "t_addp_ns = " << fmt_double(t.t_addp_ns) << "\n"
    << "salp_overlap = " << fmt_double(t.salp_overlap) << "\n"
    << "channel_bandwidth_bytes_per_s = " << fmt_double(t.channel_bandwidth_bytes_per_s) << "\n";
  return o.str();
}

TimingParams default_timing(const DramHierarchyConfig& dram) {
  TimingParams t;
  const double clk = 1000.0 / dram.bus_frequency_mhz;
  t.t_rcd_ns = 16.0;
  t.t_rp_ns = 16.0;
  t.t_pe_ns = clk;
  t.t_lb_ns = clk;
  t.t_pc_ns = clk;
  t.t_addp_ns = 4.0 * clk;
  t.salp_overlap = 0.5;
  t.channel_bandwidth_bytes_per_s = 2.0 * dram.bus_frequency_mhz * 1e6 *
                                    static_cast<double>(dram.devices_per_rank * dram.device_data_width_bits) / 8.0;
  return t;
}

SystemConfig preset(std::string_view name) {
  SystemConfig cfg;
  if (name == "desk_small") {
    cfg.dram = {.channels = 2,
                .ranks_per_channel = 2,
                .devices_per_rank = 2,
                .banks_per_device = 2,
                .subarrays_per_bank = 2,
                .rows_per_subarray = 16,
                .cols_per_subarray = 8,
                .device_data_width_bits = 8,
                .bus_frequency_mhz = 2400.0,
                .global_bitline_width_bits = 64};
    cfg.periph.pes_per_bank = 4;
    cfg.periph.lb_cols = 4;
    cfg.periph.lb_rows = 17;
    cfg.max_precision = 8;
    cfg.timing = default_timing(cfg.dram);
    validate(cfg);
    return cfg;
  }

  // DDR5-4800, x16 devices, 8 per rank.
  cfg.dram = {.channels = 8,
              .ranks_per_channel = 32,
              .devices_per_rank = 8,
              .banks_per_device = 16,
              .subarrays_per_bank = 128,
              .rows_per_subarray = 128,
              .cols_per_subarray = 16384,
              .device_data_width_bits = 16,
              .bus_frequency_mhz = 2400.0,
              .global_bitline_width_bits = 256};
  cfg.periph.pes_per_bank = 1024;
  cfg.periph.lb_cols = 1024;
  cfg.periph.lb_rows = 17;
  cfg.periph.popcount_width_bits = 32;
  cfg.periph.broadcast_bank_width_bits = 64;
  cfg.max_precision = 8;

  if (name == "racam_full") {
  } else if (name == "racam_eighth") {
    cfg.dram.ranks_per_channel = 4;
  } else if (name == "racam_sixteenth") {
    cfg.dram.channels = 4;
    cfg.dram.ranks_per_channel = 4;
  } else if (name == "racam_128th") {
    cfg.dram.channels = 1;
    cfg.dram.ranks_per_channel = 2;
  } else {
    throw ConfigError("unknown_preset", "unknown preset '" + std::string(name) + "'");
  }
  cfg.timing = default_timing(cfg.dram);
  validate(cfg);
  return cfg;
}

uint64_t config_hash(const SystemConfig& cfg) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : render(cfg)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

}  // namespace racam
