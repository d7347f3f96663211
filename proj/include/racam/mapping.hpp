// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

// GEMM mapping space: which DRAM level splits which GEMM dimension, how a
// block's rows and columns hold the dimensions, and the tiling, duplication
// and I/O traffic that follow from a choice.
//
// Literal form: H{M:RB,N:CD,K:A};B{R:MN,C:K}
//   H assigns each level (C channel, R rank, D device, B bank, A block) to one
//   dimension; B lists the dimensions held by block rows (R) and columns (C).

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "racam/arch_config.hpp"

namespace racam {

enum class Dim : uint8_t { kM = 0, kK = 1, kN = 2 };
inline constexpr std::array<Dim, 3> kDims{Dim::kM, Dim::kK, Dim::kN};
char dim_letter(Dim d);

enum class Level : uint8_t { kC = 0, kR = 1, kD = 2, kB = 3, kA = 4 };
inline constexpr std::array<Level, 5> kLevels{Level::kC, Level::kR, Level::kD, Level::kB, Level::kA};
char level_letter(Level l);

struct GemmShape {
  int64_t m = 1;
  int64_t k = 1;
  int64_t n = 1;
  unsigned precision = 8;

  bool is_gemv() const { return m == 1; }
  int64_t extent(Dim d) const { return d == Dim::kM ? m : d == Dim::kK ? k : n; }
  uint64_t macs() const { return static_cast<uint64_t>(m) * static_cast<uint64_t>(k) * static_cast<uint64_t>(n); }
  bool operator==(const GemmShape&) const = default;
};

/// Throws std::invalid_argument unless all extents and the precision are >= 1.
void validate_shape(const GemmShape& s);

struct HierarchicalMapping {
  std::array<Dim, 5> assign{Dim::kM, Dim::kM, Dim::kM, Dim::kM, Dim::kM};  // indexed by Level

  Dim at(Level l) const { return assign[static_cast<size_t>(l)]; }
  bool operator==(const HierarchicalMapping&) const = default;
};

/// Dimension set as a bit mask over Dim (bit i = Dim i).
using DimSet = uint8_t;
inline constexpr DimSet dim_bit(Dim d) { return static_cast<DimSet>(1u << static_cast<unsigned>(d)); }
inline constexpr DimSet kAllDims = 0b111;

struct BlockMapping {
  DimSet rows = dim_bit(Dim::kM) | dim_bit(Dim::kN);
  DimSet cols = dim_bit(Dim::kK);

  bool in_rows(Dim d) const { return rows & dim_bit(d); }
  bool in_cols(Dim d) const { return cols & dim_bit(d); }
  bool operator==(const BlockMapping&) const = default;
};

/// The six legal block mappings in enumeration order.
const std::array<BlockMapping, 6>& block_mappings();

struct Mapping {
  HierarchicalMapping hmap;
  BlockMapping bmap;
  bool operator==(const Mapping&) const = default;
};

class MappingError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

void validate_mapping(const Mapping& m);
std::string to_literal(const Mapping& m);
Mapping parse_mapping(std::string_view literal);

/// Every hierarchical assignment crossed with every block mapping. GEMV
/// shapes never assign M to a level. Order: hierarchical index (C most
/// significant, dims in M, N, K order) then block-mapping index.
std::vector<Mapping> enumerate_mappings(const GemmShape& shape);

/// Rows or columns of one block split evenly among `count` dimensions:
/// floor(capacity^(1/count)).
int64_t per_dim_capacity(int64_t capacity, unsigned count);

struct BlockTiling {
  std::array<int64_t, 3> iterations{1, 1, 1};  // by Dim
  std::array<int64_t, 3> chunk{1, 1, 1};       // padded extent per iteration
  int64_t total_iterations = 1;
};

/// Temporal split of a block tile (m, k, n) whose rows hold `block_rows`
/// entries and columns `block_cols`.
BlockTiling block_tiling(const std::array<int64_t, 3>& tile, const BlockMapping& bmap, int64_t block_rows,
                         int64_t block_cols);
int64_t temporal_iterations(const std::array<int64_t, 3>& tile, const BlockMapping& bmap, int64_t block_rows,
                            int64_t block_cols);

struct LevelSplit {
  Level level;
  Dim dim;
  int64_t fanout = 1;  // units available at this level
  int64_t count = 1;   // units holding a non-empty tile
  int64_t extent = 1;  // largest tile of `dim` below this level
};

struct TilePlan {
  GemmShape shape;
  Mapping mapping;
  std::array<LevelSplit, 5> levels{};    // indexed by Level
  std::array<int64_t, 3> bank_tile{};    // by Dim, largest tile held by one bank
  std::array<int64_t, 3> block_tile{};   // by Dim, largest tile held by one block
  int64_t blocks_used = 1;               // blocks of one bank holding work (run in series)
  BlockTiling tiling;
  int64_t temporal_iterations = 1;
  std::vector<Level> reduction_levels;   // levels assigned K
  bool column_reduction = false;         // K held by block columns
  std::array<std::array<int64_t, 5>, 2> duplication{};  // [input A=0 / B=1][Level]

  int64_t active_banks() const;
  /// Product of tile counts of K above the block level.
  int64_t upper_k_partials() const;
  int64_t lanes() const;     // columns in use per instruction
  int64_t segments() const;  // popcount segments per instruction (K in columns)
};

TilePlan tile(const GemmShape& shape, const Mapping& mapping, const SystemConfig& cfg);

/// Balanced split of `extent` over `fanout` units: unit i gets [begin, end).
struct Range {
  int64_t begin = 0;
  int64_t end = 0;
  int64_t size() const { return end - begin; }
};
Range balanced_part(Range r, int64_t fanout, int64_t i);

struct IoPattern {
  double broadcast_bytes = 0;       // dynamic input delivered to the array
  double collect_bytes = 0;         // outputs and upper-level partials read back
  double host_reduction_bytes = 0;  // in-array partials exported without the popcount unit
  int64_t phases = 0;               // transfer phases, each paying one row cycle
  int64_t active_channels = 1;

  double total_bytes() const { return broadcast_bytes + collect_bytes + host_reduction_bytes; }
};

IoPattern infer_io_pattern(const TilePlan& plan, const SystemConfig& cfg);

}  // namespace racam
