// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "racam/experiment.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "racam/area_model.hpp"
#include "racam/llm_frontend.hpp"
#include "racam/pim_isa.hpp"
#include "racam/report.hpp"
#include "racam/search.hpp"

namespace racam {

namespace fs = std::filesystem;

GemmShape parse_shape(const std::string& text, unsigned precision) {
  GemmShape s;
  s.precision = precision;
  char x1 = 0, x2 = 0;
  std::istringstream in(text);
  if (!(in >> s.m >> x1 >> s.k >> x2 >> s.n) || (x1 != 'x' && x1 != 'X') || (x2 != 'x' && x2 != 'X') ||
      in.peek() != std::char_traits<char>::eof())
    throw std::invalid_argument("shape must look like MxKxN, got '" + text + "'");
  validate_shape(s);
  return s;
}

void validate_params(const ExperimentParams& s) {
  static const std::vector<std::string> modes{"gemm", "gemv", "llm", "sweep"};
  static const std::vector<std::string> sweeps{"precision", "pe_count", "size", "mapping", "ablation", "mul"};
  if (std::find(modes.begin(), modes.end(), s.mode) == modes.end())
    throw std::invalid_argument("unknown mode '" + s.mode + "'");
  if (s.mode == "gemv" && s.shape_given && s.shape.m != 1)
    throw std::invalid_argument("gemv mode needs M = 1");
  if (s.mode == "sweep") {
    if (std::find(sweeps.begin(), sweeps.end(), s.sweep) == sweeps.end())
      throw std::invalid_argument("--sweep must be one of precision, pe_count, size, mapping, ablation, mul");
    if (s.sweep == "precision" && s.precisions.empty()) throw std::invalid_argument("--precisions is empty");
  } else if (!s.sweep.empty()) {
    throw std::invalid_argument("--sweep requires --mode sweep");
  }
  if (s.mode == "llm") {
    parse_model(s.model);
    parse_scenario(s.scenario);
  }
  for (unsigned p : s.precisions)
    if (p < 1 || p > 15) throw std::invalid_argument("precisions must be in [1, 15]");
}

SystemConfig resolve_config(const ExperimentParams& params) {
  SystemConfig cfg;
  std::string path = params.config_path;
  if (path.empty())
    if (const char* env = std::getenv("RACAM_CONFIG"); env != nullptr && *env != '\0') path = env;
  cfg = path.empty() ? preset(params.preset) : load_config_file(path);
  return ablate(cfg, params.ablation);
}

namespace {

class Artifacts {
 public:
  Artifacts(const std::string& dir, std::ostream& log) : dir_(dir), log_(log) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << body;
    log_ << "wrote " << p.string() << "\n";
  }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::ostream& log_;
};

std::string num(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

AreaParams area_params(const ExperimentParams& params) {
  return params.area_path.empty() ? default_area_params() : load_area_params_file(params.area_path);
}

// Two dot products reduced in the popcount unit and summed with
// add_parallel, executed through the ISA with the event log on.
void write_trace(const ExperimentParams& params, const SystemConfig& cfg, Artifacts& art, nlohmann::json& report) {
  const unsigned n = params.shape.precision;
  if (n > 15 || (cfg.periph.lb_enabled && 2 * n + 1 > static_cast<unsigned>(cfg.periph.lb_rows))) {
    report["trace"] = {{"skipped", "precision does not fit the instruction format or buffer"}};
    return;
  }
  const auto lanes = static_cast<size_t>(cfg.block_width());
  const auto u16 = [](size_t v) { return static_cast<uint16_t>(v); };
  const size_t acc_rows = (32 + lanes - 1) / lanes;
  BankState bank(4 * n + 3 * acc_rows, lanes, static_cast<size_t>(cfg.dram.subarrays_per_bank));
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<uint64_t> dist(0, (uint64_t{1} << n) - 1);
  std::vector<std::vector<uint64_t>> ops(4, std::vector<uint64_t>(lanes));
  for (auto& v : ops)
    for (auto& x : v) x = dist(rng);
  for (size_t i = 0; i < 4; ++i) bank.store_vertical(i * n, ops[i], n);
  const size_t r0 = 4 * n, r1 = r0 + acc_rows, r2 = r1 + acc_rows;
  const std::vector<PimInstruction> prog{
      PimInstruction::enable(),
      PimInstruction::arith(Opcode::kMulRed, u16(r0), 0, u16(n), static_cast<uint8_t>(n)),
      PimInstruction::arith(Opcode::kMulRed, u16(r1), u16(2 * n), u16(3 * n), static_cast<uint8_t>(n)),
      PimInstruction::arith(Opcode::kAddParallel, u16(r2), u16(r0), u16(r1), 0),
      PimInstruction::disable(),
  };
  const ExecutionResult ex = execute_program(prog, bank, cfg, true);
  int64_t expect = 0;
  for (size_t i = 0; i < lanes; ++i)
    expect += static_cast<int64_t>(ops[0][i] * ops[1][i] + ops[2][i] * ops[3][i]);
  const int32_t got = bank.load_horizontal(r2);

  art.write("trace.jsonl", ex.trace.to_jsonl(true));
  art.write("program.txt", disassemble_program(prog));
  const auto width = static_cast<unsigned>(cfg.dram.device_data_width_bits);
  write_trace_file((art.dir() / "program.pimtrace").string(),
                   {config_hash(cfg), width, encode_program(prog, width)});
  report["trace"] = {{"instructions", ex.executed},
                     {"result", got},
                     {"expected", expect},
                     {"matches", static_cast<int64_t>(got) == expect},
                     {"log_truncated", ex.trace.log_truncated()}};
}

int run_kernel(const ExperimentParams& params, const SystemConfig& cfg, Artifacts& art, std::ostream& log) {
  GemmShape shape = params.shape;
  if (params.mode == "gemv" && !params.shape_given) shape = {1, 2048, 2048, params.shape.precision};
  SearchOptions opt;
  opt.threads = params.threads;
  const SearchResult r = search_mapping(shape, cfg, opt);
  nlohmann::json rep = artifact_header(cfg);
  rep["mode"] = params.mode;
  rep["ablation"] = params.ablation.name();
  rep["config"] = config_json(cfg);
  rep["search"] = to_json(r);
  rep["area"] = area_json(cfg, area_params(params));
  if (params.log_trace) {
    ExperimentParams s = params;
    s.shape = shape;
    write_trace(s, cfg, art, rep);
  }
  art.write("report.json", rep.dump(2) + "\n");
  art.write("candidates.csv", csv_preamble(cfg) + candidates_csv(r));
  const std::string text = text_summary(r.best_report);
  art.write("summary.txt", text);
  log << text << "candidates   " << r.evaluated << "  (max/min " << num(r.ratio) << ")\n";
  return 0;
}

int run_llm(const ExperimentParams& params, const SystemConfig& cfg, Artifacts& art, std::ostream& log) {
  const LlmConfig model = parse_model(params.model);
  const Scenario sc = parse_scenario(params.scenario);
  SearchCache cache;
  SearchOptions opt;
  opt.threads = params.threads;
  FrontendOptions fe;
  fe.batched_heads = params.batched_heads;
  const WorkloadReport w = search_scenario(model, sc, cfg, cache, opt, fe);
  nlohmann::json rep = artifact_header(cfg);
  rep["mode"] = "llm";
  rep["model"] = {{"name", model.name}, {"layers", model.layers}, {"hidden", model.hidden}, {"heads", model.heads}};
  rep["scenario"] = {{"name", sc.name}, {"prompt_tokens", sc.prompt_tokens}, {"output_tokens", sc.output_tokens}};
  rep["ablation"] = params.ablation.name();
  rep["workload"] = to_json(w);
  rep["area"] = area_json(cfg, area_params(params));
  art.write("report.json", rep.dump(2) + "\n");
  art.write("kernels.csv", csv_preamble(cfg) + workload_kernels_csv(w));
  const std::string text = text_summary(w);
  art.write("summary.txt", text);
  log << text;
  return 0;
}

int run_sweep(const ExperimentParams& params, const SystemConfig& cfg, Artifacts& art, std::ostream& log) {
  SearchOptions opt;
  opt.threads = params.threads;
  std::ostringstream csv;
  csv << csv_preamble(cfg);
  const std::string& axis = params.sweep;

  if (axis == "precision") {
    csv << "precision,mapping,pim_ns,io_ns,total_ns,ratio_to_first\n";
    double first = 0;
    for (unsigned p : params.precisions) {
      GemmShape s = params.shape;
      s.precision = p;
      const SearchResult r = search_mapping(s, cfg, opt);
      if (first == 0) first = r.best_ns;
      csv << p << ',' << r.best_report.mapping << ',' << num(r.best_report.pim_latency_ns) << ','
          << num(r.best_report.io_latency_ns) << ',' << num(r.best_ns) << ',' << num(first / r.best_ns) << '\n';
    }
  } else if (axis == "pe_count") {
    csv << "pes_per_bank,mapping,pim_ns,io_ns,total_ns,pe_utilization\n";
    for (int64_t pes : params.pe_counts) {
      SystemConfig c = cfg;
      c.periph.pes_per_bank = pes;
      c.periph.lb_cols = pes;
      validate(c);
      const SearchResult r = search_mapping(params.shape, c, opt);
      csv << pes << ',' << r.best_report.mapping << ',' << num(r.best_report.pim_latency_ns) << ','
          << num(r.best_report.io_latency_ns) << ',' << num(r.best_ns) << ',' << num(r.best_report.pe_utilization)
          << '\n';
    }
  } else if (axis == "size") {
    csv << "m,k,n,mapping,pim_ns,io_ns,total_ns,compute_fraction,pe_utilization\n";
    for (int64_t sz : params.sizes) {
      const GemmShape s{sz, sz, sz, params.shape.precision};
      const SearchResult r = search_mapping(s, cfg, opt);
      const auto& b = r.best_report;
      csv << sz << ',' << sz << ',' << sz << ',' << b.mapping << ',' << num(b.pim_latency_ns) << ','
          << num(b.io_latency_ns) << ',' << num(b.total_ns) << ',' << num(b.pim_latency_ns / b.total_ns) << ','
          << num(b.pe_utilization) << '\n';
    }
  } else if (axis == "mapping") {
    const SearchResult r = search_mapping(params.shape, cfg, opt);
    csv << candidates_csv(r);
    log << "max/min candidate latency " << num(r.ratio) << "\n";
  } else if (axis == "ablation") {
    csv << "disabled,mapping,pim_ns,io_ns,total_ns,slowdown\n";
    double base = 0;
    for (const char* a : {"none", "bu", "pr", "lb", "bu,pr", "bu,pr,lb"}) {
      const SystemConfig c = ablate(cfg, Ablation::parse(a));
      const SearchResult r = search_mapping(params.shape, c, opt);
      if (base == 0) base = r.best_ns;
      csv << '"' << a << "\"," << r.best_report.mapping << ',' << num(r.best_report.pim_latency_ns) << ','
          << num(r.best_report.io_latency_ns) << ',' << num(r.best_ns) << ',' << num(r.best_ns / base) << '\n';
    }
  } else if (axis == "mul") {
    csv << "precision,reuse_array_accesses,baseline_array_accesses,reuse_ns,baseline_ns\n";
    SystemConfig c = cfg;
    for (unsigned p = 1; p <= static_cast<unsigned>(cfg.max_precision); ++p) {
      c.periph.lb_enabled = true;
      if (2 * p + 1 > static_cast<unsigned>(c.periph.lb_rows)) break;
      const InstrCost reuse = instr_cost(OpKind::kMulReuse, p, c);
      const InstrCost base = instr_cost(OpKind::kMulBaseline, p, c);
      csv << p << ',' << reuse.array_row_accesses() << ',' << base.array_row_accesses() << ','
          << num(reuse.latency_ns) << ',' << num(base.latency_ns) << '\n';
    }
  }
  art.write("sweep_" + axis + ".csv", csv.str());
  return 0;
}

}  // namespace

int run_experiment(const ExperimentParams& params, std::ostream& log) {
  validate_params(params);
  const SystemConfig cfg = resolve_config(params);
  Artifacts art(params.out_dir, log);
  art.write("config.ini", render(cfg));
  if (params.mode == "gemm" || params.mode == "gemv") return run_kernel(params, cfg, art, log);
  if (params.mode == "llm") return run_llm(params, cfg, art, log);
  return run_sweep(params, cfg, art, log);
}

}  // namespace racam
