// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Exhaustive mapping search. Candidates may be evaluated on several threads;
// the winner is the minimum of (total latency, mapping literal), so the result
// does not depend on the schedule.

#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "racam/arch_config.hpp"
#include "racam/llm_frontend.hpp"
#include "racam/mapping.hpp"
#include "racam/perf_model.hpp"

namespace racam {

struct Candidate {
  std::string literal;
  double pim_ns = 0;
  double io_ns = 0;
  double total_ns = 0;
};

struct SearchOptions {
  unsigned threads = 1;  // 0 picks the hardware concurrency
  bool keep_candidates = true;
};

struct SearchResult {
  Mapping best;
  LatencyReport best_report;
  size_t evaluated = 0;
  double best_ns = 0;
  double worst_ns = 0;
  double ratio = 1;  // worst / best
  double seconds = 0;
  std::vector<Candidate> candidates;  // enumeration order
};

SearchResult search_mapping(const GemmShape& shape, const SystemConfig& cfg, const SearchOptions& opt = {});

/// One row per candidate in enumeration order: literal,pim_ns,io_ns,total_ns.
std::string candidates_csv(const SearchResult& r);

/// Shared by concurrent searches; keyed by shape and configuration hash
/// (which covers the unit flags).
class SearchCache {
 public:
  using Key = std::tuple<int64_t, int64_t, int64_t, unsigned, uint64_t>;

  const SearchResult& get_or_search(const GemmShape& shape, const SystemConfig& cfg, const SearchOptions& opt);
  size_t hits() const;
  size_t misses() const;
  size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<Key, SearchResult> entries_;
  size_t hits_ = 0;
  size_t misses_ = 0;
};

struct KernelOutcome {
  GemmShape shape;
  std::string role;
  std::string stage;
  uint64_t instances = 0;  // layers x heads x steps sharing this shape
  std::string best_mapping;
  double latency_ns = 0;   // one instance
  double pim_ns = 0;
  double io_ns = 0;
  double utilization = 0;
};

struct WorkloadReport {
  std::vector<KernelOutcome> kernels;  // one per (stage, role, shape)
  double total_ns = 0;
  double pim_ns = 0;
  double io_ns = 0;
  double prefill_ns = 0;
  double decode_ns = 0;
  uint64_t kernel_instances = 0;
  size_t unique_shapes = 0;
  int64_t prompt_tokens = 0;
  int64_t output_tokens = 0;
  double seconds = 0;

  /// (prompt + output tokens) per second of modeled latency.
  double throughput_tokens_per_s() const;
};

WorkloadReport search_workload(const KernelStream& stream, const SystemConfig& cfg, SearchCache& cache,
                               const SearchOptions& opt = {});

/// Same totals as search_workload(scenario_kernels(...)) without building the
/// per-layer stream.
WorkloadReport search_scenario(const LlmConfig& model, const Scenario& sc, const SystemConfig& cfg,
                               SearchCache& cache, const SearchOptions& opt = {}, FrontendOptions fe = {});

}  // namespace racam
