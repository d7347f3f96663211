// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "racam/llm_frontend.hpp"

#include <array>
#include <sstream>
#include <stdexcept>

namespace racam {

namespace {

const std::array<LlmConfig, 4>& presets() {
  static const std::array<LlmConfig, 4> kPresets{{
      {"gpt3-6.7b", 32, 4096, 32, 8},
      {"gpt3-175b", 96, 12288, 96, 8},
      {"llama3-8b", 32, 4096, 32, 8},
      {"llama3-70b", 80, 8192, 64, 8},
  }};
  return kPresets;
}

const std::array<Scenario, 2>& scenarios() {
  static const std::array<Scenario, 2> kScenarios{{
      {"code_generation", 1024, 4096},
      {"context_understanding", 8192, 256},
  }};
  return kScenarios;
}

void layer_kernels(KernelStream& out, const LlmConfig& m, int64_t tokens, int64_t ctx, Stage st, int64_t layer,
                   int64_t step, FrontendOptions opt) {
  const int64_t h = m.hidden;
  const int64_t hd = h / m.heads;
  const unsigned p = m.precision;
  auto add = [&](GemmShape s, KernelRole r, int64_t repeat) {
    s.precision = p;
    out.push_back({s, st, layer, r, repeat, step});
  };
  add({tokens, h, 3 * h}, KernelRole::kQkv, 1);
  if (opt.batched_heads) {
    add({tokens, hd, ctx * m.heads}, KernelRole::kScore, 1);
    add({tokens, ctx * m.heads, hd}, KernelRole::kContext, 1);
  } else {
    add({tokens, hd, ctx}, KernelRole::kScore, m.heads);
    add({tokens, ctx, hd}, KernelRole::kContext, m.heads);
  }
  add({tokens, h, h}, KernelRole::kOutProj, 1);
  add({tokens, h, 4 * h}, KernelRole::kFfnUp, 1);
  add({tokens, 4 * h, h}, KernelRole::kFfnDown, 1);
}

}  // namespace

void validate(const LlmConfig& m) {
  if (m.layers < 1 || m.hidden < 1 || m.heads < 1) throw std::invalid_argument("model dimensions must be >= 1");
  if (m.hidden % m.heads != 0)
    throw std::invalid_argument("hidden size " + std::to_string(m.hidden) + " is not divisible by " +
                                std::to_string(m.heads) + " heads");
  if (m.precision < 1) throw std::invalid_argument("model precision must be >= 1");
}

LlmConfig parse_model(std::string_view name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

std::vector<std::string> model_names() {
  std::vector<std::string> out;
  for (const auto& p : presets()) out.push_back(p.name);
  return out;
}

std::string_view stage_name(Stage s) { return s == Stage::kPrefill ? "prefill" : "decode"; }

std::string_view role_name(KernelRole r) {
  switch (r) {
    case KernelRole::kQkv:
      return "qkv";
    case KernelRole::kScore:
      return "score";
    case KernelRole::kContext:
      return "context";
    case KernelRole::kOutProj:
      return "out_proj";
    case KernelRole::kFfnUp:
      return "ffn_up";
    case KernelRole::kFfnDown:
      return "ffn_down";
  }
  return "unknown";
}

KernelStream layer_template(const LlmConfig& m, int64_t tokens, int64_t ctx, Stage stage, int64_t step,
                            FrontendOptions opt) {
  validate(m);
  if (tokens < 1 || ctx < 1) throw std::invalid_argument("token counts must be >= 1");
  KernelStream out;
  layer_kernels(out, m, tokens, ctx, stage, 0, step, opt);
  return out;
}

KernelStream prefill_kernels(const LlmConfig& m, int64_t seq, FrontendOptions opt) {
  validate(m);
  if (seq < 1) throw std::invalid_argument("sequence length must be >= 1");
  KernelStream out;
  for (int64_t l = 0; l < m.layers; ++l) layer_kernels(out, m, seq, seq, Stage::kPrefill, l, 0, opt);
  return out;
}

KernelStream decode_kernels(const LlmConfig& m, int64_t context_len, int64_t step, FrontendOptions opt) {
  validate(m);
  if (context_len < 1) throw std::invalid_argument("context length must be >= 1");
  KernelStream out;
  for (int64_t l = 0; l < m.layers; ++l) layer_kernels(out, m, 1, context_len, Stage::kDecode, l, step, opt);
  return out;
}

Scenario parse_scenario(std::string_view name) {
  for (const auto& s : scenarios())
    if (s.name == name) return s;
  throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

std::vector<std::string> scenario_names() {
  std::vector<std::string> out;
  for (const auto& s : scenarios()) out.push_back(s.name);
  return out;
}

KernelStream scenario_kernels(const LlmConfig& m, const Scenario& s, FrontendOptions opt) {
  if (s.prompt_tokens < 1 || s.output_tokens < 1) throw std::invalid_argument("token counts must be >= 1");
  KernelStream out = prefill_kernels(m, s.prompt_tokens, opt);
  for (int64_t i = 1; i <= s.output_tokens; ++i) {
    KernelStream d = decode_kernels(m, s.prompt_tokens + i, i, opt);
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

uint64_t stream_macs(const KernelStream& s) {
  uint64_t t = 0;
  for (const Kernel& k : s) t += k.macs();
  return t;
}

uint64_t analytic_layer_macs(int64_t m, int64_t ctx, int64_t hidden) {
  const auto M = static_cast<uint64_t>(m), C = static_cast<uint64_t>(ctx), H = static_cast<uint64_t>(hidden);
  return 12 * M * H * H + 2 * M * C * H;
}

std::string stream_csv(const KernelStream& s) {
  std::ostringstream o;
  o << "stage,step,layer,role,m,k,n,precision,repeat\n";
  for (const Kernel& k : s)
    o << stage_name(k.stage) << ',' << k.step << ',' << k.layer << ',' << role_name(k.role) << ',' << k.shape.m << ','
      << k.shape.k << ',' << k.shape.n << ',' << k.shape.precision << ',' << k.repeat << '\n';
  return o.str();
}

}  // namespace racam
