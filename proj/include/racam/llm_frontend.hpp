// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Transformer decoder stacks as streams of matmul kernels. Batch size is 1
// and only matmuls are modeled (softmax and normalization are excluded).

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "racam/mapping.hpp"

namespace racam {

struct LlmConfig {
  std::string name = "custom";
  int64_t layers = 1;
  int64_t hidden = 1;
  int64_t heads = 1;
  unsigned precision = 8;

  bool operator==(const LlmConfig&) const = default;
};

void validate(const LlmConfig& m);

/// Presets: gpt3-6.7b, gpt3-175b, llama3-8b, llama3-70b (multi-head
/// attention at the listed head count, int8).
LlmConfig parse_model(std::string_view name);
std::vector<std::string> model_names();

enum class Stage : uint8_t { kPrefill, kDecode };
std::string_view stage_name(Stage s);

enum class KernelRole : uint8_t { kQkv, kScore, kContext, kOutProj, kFfnUp, kFfnDown };
std::string_view role_name(KernelRole r);

struct Kernel {
  GemmShape shape;
  Stage stage = Stage::kPrefill;
  int64_t layer = 0;
  KernelRole role = KernelRole::kQkv;
  int64_t repeat = 1;  // identical instances (one per attention head)
  int64_t step = 0;    // decode step, 0 for prefill

  uint64_t macs() const { return shape.macs() * static_cast<uint64_t>(repeat); }
};

using KernelStream = std::vector<Kernel>;

/// Attention runs one kernel per head unless `batched_heads`, which folds the
/// heads into one kernel with heads-times larger N (score) or K (context).
struct FrontendOptions {
  bool batched_heads = false;
};

/// Kernels of one layer (layer index 0); every layer of a pass is identical.
KernelStream layer_template(const LlmConfig& m, int64_t tokens, int64_t ctx, Stage stage, int64_t step = 0,
                            FrontendOptions opt = {});

KernelStream prefill_kernels(const LlmConfig& m, int64_t seq, FrontendOptions opt = {});
/// One decode step attending over `context_len` cached tokens.
KernelStream decode_kernels(const LlmConfig& m, int64_t context_len, int64_t step = 0, FrontendOptions opt = {});

struct Scenario {
  std::string name;
  int64_t prompt_tokens = 1;
  int64_t output_tokens = 1;
};
/// code_generation (1024 in, 4096 out) and context_understanding (8192, 256).
Scenario parse_scenario(std::string_view name);
std::vector<std::string> scenario_names();

/// Prefill at prompt_tokens, then output_tokens decode steps; step i attends
/// over prompt_tokens + i tokens.
KernelStream scenario_kernels(const LlmConfig& m, const Scenario& s, FrontendOptions opt = {});

uint64_t stream_macs(const KernelStream& s);
/// Per-layer matmul MACs of a pass with `m` query tokens over `ctx` keys:
/// 12*m*h^2 + 2*m*ctx*h.
uint64_t analytic_layer_macs(int64_t m, int64_t ctx, int64_t hidden);

std::string stream_csv(const KernelStream& s);

}  // namespace racam
