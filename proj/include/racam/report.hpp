// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Structured (JSON) and CSV renderings of model results. Every artifact
// carries the tool version and the configuration hash.

#pragma once

#include <string>

#include <json.hpp>

#include "racam/area_model.hpp"
#include "racam/arch_config.hpp"
#include "racam/perf_model.hpp"
#include "racam/search.hpp"

namespace racam {

std::string tool_version();

/// {"tool", "version", "config_hash"}
nlohmann::json artifact_header(const SystemConfig& cfg);
/// "# tool=racam-sim version=... config_hash=...\n", the first line of every CSV.
std::string csv_preamble(const SystemConfig& cfg);

nlohmann::json to_json(const IoPattern& io);
nlohmann::json to_json(const LatencyReport& r);
nlohmann::json to_json(const SearchResult& r);
nlohmann::json to_json(const WorkloadReport& r);
nlohmann::json area_json(const SystemConfig& cfg, const AreaParams& p);
nlohmann::json config_json(const SystemConfig& cfg);

std::string latency_csv_header();
std::string latency_csv_row(const LatencyReport& r);
std::string workload_kernels_csv(const WorkloadReport& r);

/// Fixed-width text for terminals.
std::string text_summary(const LatencyReport& r);
std::string text_summary(const WorkloadReport& r);

}  // namespace racam
