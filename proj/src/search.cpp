// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "racam/search.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>
#include <thread>

namespace racam {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool better(const Candidate& a, const Candidate& b) {
  if (a.total_ns != b.total_ns) return a.total_ns < b.total_ns;
  return a.literal < b.literal;
}

}  // namespace

SearchResult search_mapping(const GemmShape& shape, const SystemConfig& cfg, const SearchOptions& opt) {
  const auto t0 = Clock::now();
  const std::vector<Mapping> space = enumerate_mappings(shape);
  if (space.empty()) throw std::logic_error("empty mapping space");
  std::vector<Candidate> cands(space.size());

  auto eval = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const LatencyReport r = kernel_latency(shape, space[i], cfg);
      cands[i] = {r.mapping, r.pim_latency_ns, r.io_latency_ns, r.total_ns};
    }
  };
  unsigned threads = opt.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opt.threads;
  threads = static_cast<unsigned>(std::min<size_t>(threads, space.size()));
  if (threads <= 1) {
    eval(0, space.size());
  } else {
    std::vector<std::thread> pool;
    const size_t per = (space.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const size_t b = std::min(space.size(), t * per), e = std::min(space.size(), b + per);
      pool.emplace_back(eval, b, e);
    }
    for (auto& th : pool) th.join();
  }

  size_t best = 0;
  double worst = cands[0].total_ns;
  for (size_t i = 1; i < cands.size(); ++i) {
    if (better(cands[i], cands[best])) best = i;
    worst = std::max(worst, cands[i].total_ns);
  }
  SearchResult r;
  r.best = space[best];
  r.best_report = kernel_latency(shape, r.best, cfg);
  r.evaluated = cands.size();
  r.best_ns = cands[best].total_ns;
  r.worst_ns = worst;
  r.ratio = worst / r.best_ns;
  if (opt.keep_candidates) r.candidates = std::move(cands);
  r.seconds = seconds_since(t0);
  return r;
}

std::string candidates_csv(const SearchResult& r) {
  std::ostringstream o;
  o.precision(17);
  o << "literal,pim_ns,io_ns,total_ns\n";
  for (const Candidate& c : r.candidates) o << c.literal << ',' << c.pim_ns << ',' << c.io_ns << ',' << c.total_ns << '\n';
  return o.str();
}

const SearchResult& SearchCache::get_or_search(const GemmShape& shape, const SystemConfig& cfg,
                                               const SearchOptions& opt) {
  const Key key{shape.m, shape.k, shape.n, shape.precision, config_hash(cfg)};
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = entries_.find(key); it != entries_.end()) {
      ++hits_;
      return it->second;
    }
  }
  SearchOptions o = opt;
  o.keep_candidates = false;
  SearchResult r = search_mapping(shape, cfg, o);
  std::lock_guard<std::mutex> lock(mu_);
  ++misses_;
  // A concurrent insert of the same key holds an identical result.
  return entries_.try_emplace(key, std::move(r)).first->second;
}

size_t SearchCache::hits() const {
  std::lock_guard<std::mutex> lock(mu_);
  return hits_;
}
size_t SearchCache::misses() const {
  std::lock_guard<std::mutex> lock(mu_);
  return misses_;
}
size_t SearchCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

double WorkloadReport::throughput_tokens_per_s() const {
  if (total_ns <= 0) return 0;
  return static_cast<double>(prompt_tokens + output_tokens) / (total_ns * 1e-9);
}

namespace {

class Accumulator {
 public:
  Accumulator(const SystemConfig& cfg, SearchCache& cache, const SearchOptions& opt)
      : cfg_(cfg), cache_(cache), opt_(opt) {}

  void add(const Kernel& k, uint64_t instances) {
    const SearchResult& r = cache_.get_or_search(k.shape, cfg_, opt_);
    const uint64_t n = instances * static_cast<uint64_t>(k.repeat);
    const double t = r.best_report.total_ns * static_cast<double>(n);
    rep_.total_ns += t;
    rep_.pim_ns += r.best_report.pim_latency_ns * static_cast<double>(n);
    rep_.io_ns += r.best_report.io_latency_ns * static_cast<double>(n);
    (k.stage == Stage::kPrefill ? rep_.prefill_ns : rep_.decode_ns) += t;
    rep_.kernel_instances += n;

    const auto key = std::make_tuple(static_cast<int>(k.stage), static_cast<int>(k.role), k.shape.m, k.shape.k,
                                     k.shape.n, k.shape.precision);
    auto [it, fresh] = index_.try_emplace(key, rep_.kernels.size());
    if (fresh)
      rep_.kernels.push_back({k.shape, std::string(role_name(k.role)), std::string(stage_name(k.stage)), 0,
                              r.best_report.mapping, r.best_report.total_ns, r.best_report.pim_latency_ns,
                              r.best_report.io_latency_ns, r.best_report.pe_utilization});
    rep_.kernels[it->second].instances += n;
    shapes_.insert({k.shape.m, k.shape.k, k.shape.n, k.shape.precision});
  }

  WorkloadReport finish(Clock::time_point t0) {
    rep_.unique_shapes = shapes_.size();
    rep_.seconds = seconds_since(t0);
    return std::move(rep_);
  }

  WorkloadReport& report() { return rep_; }

 private:
  const SystemConfig& cfg_;
  SearchCache& cache_;
  const SearchOptions& opt_;
  WorkloadReport rep_;
  std::map<std::tuple<int, int, int64_t, int64_t, int64_t, unsigned>, size_t> index_;
  std::set<std::tuple<int64_t, int64_t, int64_t, unsigned>> shapes_;
};

}  // namespace

WorkloadReport search_workload(const KernelStream& stream, const SystemConfig& cfg, SearchCache& cache,
                               const SearchOptions& opt) {
  if (stream.empty()) throw std::invalid_argument("empty kernel stream");
  const auto t0 = Clock::now();
  Accumulator acc(cfg, cache, opt);
  int64_t max_step = 0, prompt = 0;
  for (const Kernel& k : stream) {
    acc.add(k, 1);
    max_step = std::max(max_step, k.step);
    if (k.stage == Stage::kPrefill) prompt = std::max(prompt, k.shape.m);
  }
  acc.report().prompt_tokens = prompt;
  acc.report().output_tokens = max_step;
  return acc.finish(t0);
}

WorkloadReport search_scenario(const LlmConfig& model, const Scenario& sc, const SystemConfig& cfg, SearchCache& cache,
                               const SearchOptions& opt, FrontendOptions fe) {
  const auto t0 = Clock::now();
  Accumulator acc(cfg, cache, opt);
  const auto layers = static_cast<uint64_t>(model.layers);
  for (const Kernel& k : layer_template(model, sc.prompt_tokens, sc.prompt_tokens, Stage::kPrefill, 0, fe))
    acc.add(k, layers);
  for (int64_t i = 1; i <= sc.output_tokens; ++i)
    for (const Kernel& k : layer_template(model, 1, sc.prompt_tokens + i, Stage::kDecode, i, fe)) acc.add(k, layers);
  acc.report().prompt_tokens = sc.prompt_tokens;
  acc.report().output_tokens = sc.output_tokens;
  return acc.finish(t0);
}

}  // namespace racam
