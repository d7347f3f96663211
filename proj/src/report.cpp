// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "racam/report.hpp"

#include <cstdio>
#include <sstream>

namespace racam {

namespace {

std::string num(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

std::string fixed(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

std::string tool_version() { return RACAM_VERSION; }

nlohmann::json artifact_header(const SystemConfig& cfg) {
  return {{"tool", "racam-sim"}, {"version", tool_version()}, {"config_hash", hash_hex(config_hash(cfg))}};
}

std::string csv_preamble(const SystemConfig& cfg) {
  return "# tool=racam-sim version=" + tool_version() + " config_hash=" + hash_hex(config_hash(cfg)) + "\n";
}

nlohmann::json to_json(const IoPattern& io) {
  return {{"broadcast_bytes", io.broadcast_bytes},
          {"collect_bytes", io.collect_bytes},
          {"host_reduction_bytes", io.host_reduction_bytes},
          {"phases", io.phases},
          {"active_channels", io.active_channels}};
}

nlohmann::json to_json(const LatencyReport& r) {
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [k, v] : r.histogram) hist[k] = v;
  return {{"shape", {{"m", r.shape.m}, {"k", r.shape.k}, {"n", r.shape.n}, {"precision", r.shape.precision}}},
          {"mapping", r.mapping},
          {"pim_latency_ns", r.pim_latency_ns},
          {"io_latency_ns", r.io_latency_ns},
          {"total_ns", r.total_ns},
          {"pe_utilization", r.pe_utilization},
          {"temporal_iterations", r.temporal_iterations},
          {"active_banks", r.active_banks},
          {"instructions_per_bank", hist},
          {"io", to_json(r.io)}};
}

nlohmann::json to_json(const SearchResult& r) {
  return {{"best", to_json(r.best_report)},
          {"candidates", r.evaluated},
          {"best_ns", r.best_ns},
          {"worst_ns", r.worst_ns},
          {"max_min_ratio", r.ratio}};
}

nlohmann::json to_json(const WorkloadReport& r) {
  nlohmann::json kernels = nlohmann::json::array();
  for (const KernelOutcome& k : r.kernels)
    kernels.push_back({{"stage", k.stage},
                       {"role", k.role},
                       {"m", k.shape.m},
                       {"k", k.shape.k},
                       {"n", k.shape.n},
                       {"instances", k.instances},
                       {"mapping", k.best_mapping},
                       {"latency_ns", k.latency_ns}});
  return {{"total_ns", r.total_ns},
          {"pim_ns", r.pim_ns},
          {"io_ns", r.io_ns},
          {"prefill_ns", r.prefill_ns},
          {"decode_ns", r.decode_ns},
          {"kernel_instances", r.kernel_instances},
          {"unique_shapes", r.unique_shapes},
          {"prompt_tokens", r.prompt_tokens},
          {"output_tokens", r.output_tokens},
          {"throughput_tokens_per_s", r.throughput_tokens_per_s()},
          {"kernel_count", r.kernels.size()}};
}

nlohmann::json area_json(const SystemConfig& cfg, const AreaParams& p) {
  return {{"dram_area_mm2", dram_area_mm2(cfg, p)},
          {"logic_area_mm2", logic_area_mm2(cfg, p)},
          {"locality_buffer_area_mm2", locality_buffer_area_mm2(cfg, p)},
          {"peripheral_area_mm2", peripheral_area_mm2(cfg, p)},
          {"overhead_fraction", overhead_fraction(cfg, p)}};
}

nlohmann::json config_json(const SystemConfig& cfg) {
  return {{"channels", cfg.dram.channels},
          {"ranks_per_channel", cfg.dram.ranks_per_channel},
          {"devices_per_rank", cfg.dram.devices_per_rank},
          {"banks_per_device", cfg.dram.banks_per_device},
          {"subarrays_per_bank", cfg.dram.subarrays_per_bank},
          {"pes_per_bank", cfg.periph.pes_per_bank},
          {"total_pes", cfg.total_pes()},
          {"lb_enabled", cfg.periph.lb_enabled},
          {"pr_enabled", cfg.periph.pr_enabled},
          {"bu_enabled", cfg.periph.bu_enabled}};
}

std::string latency_csv_header() {
  return "m,k,n,precision,mapping,pim_ns,io_ns,total_ns,pe_utilization,mul_red,mul,add,add_parallel\n";
}

std::string latency_csv_row(const LatencyReport& r) {
  std::ostringstream o;
  auto h = [&](const char* k) {
    const auto it = r.histogram.find(k);
    return it == r.histogram.end() ? uint64_t{0} : it->second;
  };
  o << r.shape.m << ',' << r.shape.k << ',' << r.shape.n << ',' << r.shape.precision << ',' << r.mapping << ','
    << num(r.pim_latency_ns) << ',' << num(r.io_latency_ns) << ',' << num(r.total_ns) << ','
    << num(r.pe_utilization) << ',' << h("pim_mul_red") << ',' << h("pim_mul") << ',' << h("pim_add") << ','
    << h("pim_add_parallel") << '\n';
  return o.str();
}

std::string workload_kernels_csv(const WorkloadReport& r) {
  std::ostringstream o;
  o << "stage,role,m,k,n,precision,instances,mapping,latency_ns,pim_ns,io_ns\n";
  for (const KernelOutcome& k : r.kernels)
    o << k.stage << ',' << k.role << ',' << k.shape.m << ',' << k.shape.k << ',' << k.shape.n << ','
      << k.shape.precision << ',' << k.instances << ',' << k.best_mapping << ',' << num(k.latency_ns) << ','
      << num(k.pim_ns) << ',' << num(k.io_ns) << '\n';
  return o.str();
}

std::string text_summary(const LatencyReport& r) {
  std::ostringstream o;
  o << "shape        " << r.shape.m << "x" << r.shape.k << "x" << r.shape.n << " int" << r.shape.precision << "\n"
    << "mapping      " << r.mapping << "\n"
    << "pim latency  " << fixed("%14.3f us", r.pim_latency_ns / 1e3) << "\n"
    << "io latency   " << fixed("%14.3f us", r.io_latency_ns / 1e3) << "\n"
    << "total        " << fixed("%14.3f us", r.total_ns / 1e3) << "\n"
    << "utilization  " << fixed("%14.4f", r.pe_utilization) << "\n";
  return o.str();
}

std::string text_summary(const WorkloadReport& r) {
  std::ostringstream o;
  o << "prompt/output   " << r.prompt_tokens << " / " << r.output_tokens << " tokens\n"
    << "prefill         " << fixed("%14.3f ms", r.prefill_ns / 1e6) << "\n"
    << "decode          " << fixed("%14.3f ms", r.decode_ns / 1e6) << "\n"
    << "total           " << fixed("%14.3f ms", r.total_ns / 1e6) << "\n"
    << "pim / io        " << fixed("%14.3f ms", r.pim_ns / 1e6) << " / " << fixed("%.3f ms", r.io_ns / 1e6) << "\n"
    << "throughput      " << fixed("%14.2f tok/s", r.throughput_tokens_per_s()) << "\n"
    << "unique shapes   " << r.unique_shapes << "\n";
  return o.str();
}

}  // namespace racam
