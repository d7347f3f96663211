// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace racam {

/// Raised by load_config/validate. `invariant()` names the rule that failed
/// (e.g. "lb_rows_capacity") so callers and tests can match on it.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string invariant, const std::string& what)
      : std::runtime_error(what), invariant_(std::move(invariant)) {}
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

struct DramHierarchyConfig {
  int64_t channels = 1;
  int64_t ranks_per_channel = 1;
  int64_t devices_per_rank = 1;
  int64_t banks_per_device = 1;
  int64_t subarrays_per_bank = 1;
  int64_t rows_per_subarray = 1;
  int64_t cols_per_subarray = 1;
  int64_t device_data_width_bits = 8;
  double bus_frequency_mhz = 2400.0;
  // Stored and rendered, not consumed by any latency formula.
  int64_t global_bitline_width_bits = 64;

  bool operator==(const DramHierarchyConfig&) const = default;
};

struct PeripheralConfig {
  int64_t pes_per_bank = 1;
  int64_t lb_rows = 17;
  int64_t lb_cols = 1;
  int64_t popcount_width_bits = 32;
  int64_t broadcast_bank_width_bits = 64;
  bool lb_enabled = true;
  bool pr_enabled = true;
  bool bu_enabled = true;

  bool operator==(const PeripheralConfig&) const = default;
};

struct TimingParams {
  double t_rcd_ns = 16.0;
  double t_rp_ns = 16.0;
  double t_pe_ns = 1.0;
  double t_lb_ns = 1.0;
  double t_pc_ns = 1.0;
  double t_addp_ns = 4.0;
  double salp_overlap = 0.5;
  double channel_bandwidth_bytes_per_s = 1e9;

  bool operator==(const TimingParams&) const = default;

  /// Cost of one ACT/PRE pair after the overlapped-activation discount.
  double array_access_ns() const { return (t_rcd_ns + t_rp_ns) * (1.0 - salp_overlap); }
};

/// Complete hardware description. Derived geometry is computed on demand from
/// the stored fields, so it can never go stale.
struct SystemConfig {
  DramHierarchyConfig dram;
  PeripheralConfig periph;
  TimingParams timing;
  int64_t max_precision = 8;

  bool operator==(const SystemConfig&) const = default;

  int64_t block_width() const { return periph.pes_per_bank; }
  int64_t blocks_per_bank() const {
    return dram.subarrays_per_bank * ((dram.cols_per_subarray + block_width() - 1) / block_width());
  }
  int64_t total_banks() const {
    return dram.channels * dram.ranks_per_channel * dram.devices_per_rank * dram.banks_per_device;
  }
  int64_t total_pes() const { return total_banks() * periph.pes_per_bank; }
  /// Storage bits across the whole system.
  double total_bits() const {
    return static_cast<double>(total_banks()) * static_cast<double>(dram.subarrays_per_bank) *
           static_cast<double>(dram.rows_per_subarray) * static_cast<double>(dram.cols_per_subarray);
  }
  double bus_period_ns() const { return 1000.0 / dram.bus_frequency_mhz; }
};

/// Throws ConfigError on the first violated invariant.
void validate(const SystemConfig& cfg);

/// Parses the INI-style description ([dram], [peripherals], [timing]).
/// Every key is required.
SystemConfig load_config(std::string_view source);
SystemConfig load_config_file(const std::string& path);

/// Inverse of load_config: load_config(render(cfg)) == cfg.
std::string render(const SystemConfig& cfg);

/// Known ids: racam_full, racam_eighth, racam_sixteenth, racam_128th, desk_small.
SystemConfig preset(std::string_view name);

/// Timing defaults for a given bus frequency: 16 ns tRCD/tRP, one bus clock
/// for PE, buffer and popcount steps, four clocks for the parallel add, and
/// double-data-rate channel bandwidth across the rank's data pins.
TimingParams default_timing(const DramHierarchyConfig& dram);

/// Stable 64-bit FNV-1a hash of render(cfg); embedded in every artifact.
uint64_t config_hash(const SystemConfig& cfg);
std::string hash_hex(uint64_t h);

}  // namespace racam
