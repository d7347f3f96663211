// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "racam/mapping.hpp"

#include <algorithm>
#include <bit>
#include <map>

namespace racam {

namespace {

int64_t ceil_div(int64_t a, int64_t b) { return (a + b - 1) / b; }

constexpr std::array<Dim, 3> kPrintOrder{Dim::kM, Dim::kN, Dim::kK};

size_t idx(Dim d) { return static_cast<size_t>(d); }
size_t idx(Level l) { return static_cast<size_t>(l); }

Dim dim_from_letter(char c) {
  switch (c) {
    case 'M':
      return Dim::kM;
    case 'K':
      return Dim::kK;
    case 'N':
      return Dim::kN;
  }
  throw MappingError(std::string("unknown dimension '") + c + "'");
}

Level level_from_letter(char c) {
  for (Level l : kLevels)
    if (level_letter(l) == c) return l;
  throw MappingError(std::string("unknown level '") + c + "'");
}

int64_t level_fanout(const SystemConfig& cfg, Level l) {
  switch (l) {
    case Level::kC:
      return cfg.dram.channels;
    case Level::kR:
      return cfg.dram.ranks_per_channel;
    case Level::kD:
      return cfg.dram.devices_per_rank;
    case Level::kB:
      return cfg.dram.banks_per_device;
    case Level::kA:
      return cfg.blocks_per_bank();
  }
  return 1;
}

std::string dims_string(DimSet s) {
  std::string out;
  for (Dim d : kPrintOrder)
    if (s & dim_bit(d)) out += dim_letter(d);
  return out;
}

}  // namespace

char dim_letter(Dim d) { return "MKN"[idx(d)]; }
char level_letter(Level l) { return "CRDBA"[idx(l)]; }

void validate_shape(const GemmShape& s) {
  if (s.m < 1 || s.k < 1 || s.n < 1)
    throw std::invalid_argument("GEMM extents must be >= 1, got " + std::to_string(s.m) + "x" + std::to_string(s.k) +
                                "x" + std::to_string(s.n));
  if (s.precision < 1) throw std::invalid_argument("precision must be >= 1");
}

const std::array<BlockMapping, 6>& block_mappings() {
  constexpr DimSet M = dim_bit(Dim::kM), K = dim_bit(Dim::kK), N = dim_bit(Dim::kN);
  static const std::array<BlockMapping, 6> kAll{{
      {static_cast<DimSet>(M | N), K},
      {static_cast<DimSet>(M | K), N},
      {static_cast<DimSet>(N | K), M},
      {M, static_cast<DimSet>(N | K)},
      {N, static_cast<DimSet>(M | K)},
      {K, static_cast<DimSet>(M | N)},
  }};
  return kAll;
}

void validate_mapping(const Mapping& m) {
  if (m.bmap.rows == 0 || m.bmap.cols == 0) throw MappingError("block rows and columns must both hold a dimension");
  if ((m.bmap.rows & m.bmap.cols) != 0) throw MappingError("a dimension is held by both block rows and columns");
  if ((m.bmap.rows | m.bmap.cols) != kAllDims) throw MappingError("block mapping must cover M, N and K");
  for (Dim d : m.hmap.assign)
    if (idx(d) > 2) throw MappingError("invalid dimension in hierarchical mapping");
}

std::string to_literal(const Mapping& m) {
  std::string s = "H{";
  bool first = true;
  for (Dim d : kPrintOrder) {
    std::string letters;
    for (Level l : kLevels)
      if (m.hmap.at(l) == d) letters += level_letter(l);
    if (letters.empty()) continue;
    if (!first) s += ',';
    s += dim_letter(d);
    s += ':' + letters;
    first = false;
  }
  s += "};B{R:" + dims_string(m.bmap.rows) + ",C:" + dims_string(m.bmap.cols) + "}";
  return s;
}

Mapping parse_mapping(std::string_view literal) {
  std::string s;
  for (char c : literal)
    if (c != ' ' && c != '\t') s += c;
  const auto semi = s.find(';');
  if (s.rfind("H{", 0) != 0 || semi == std::string::npos || semi < 3 || s[semi - 1] != '}' ||
      s.compare(semi + 1, 2, "B{") != 0 || s.back() != '}')
    throw MappingError("mapping literal must look like H{M:RB,N:CD,K:A};B{R:MN,C:K}, got '" + std::string(literal) +
                       "'");
  auto entries = [](std::string_view body) {
    std::vector<std::pair<char, std::string>> out;
    size_t pos = 0;
    while (pos <= body.size()) {
      const size_t comma = std::min(body.find(',', pos), body.size());
      const std::string_view item = body.substr(pos, comma - pos);
      if (item.size() < 3 || item[1] != ':') throw MappingError("malformed mapping entry '" + std::string(item) + "'");
      out.emplace_back(item[0], std::string(item.substr(2)));
      pos = comma + 1;
    }
    return out;
  };

  Mapping m;
  std::array<bool, 5> seen{};
  for (const auto& [dl, levels] : entries(std::string_view(s).substr(2, semi - 3))) {
    const Dim d = dim_from_letter(dl);
    for (char lc : levels) {
      const Level l = level_from_letter(lc);
      if (seen[idx(l)]) throw MappingError(std::string("level ") + lc + " assigned twice");
      seen[idx(l)] = true;
      m.hmap.assign[idx(l)] = d;
    }
  }
  for (Level l : kLevels)
    if (!seen[idx(l)]) throw MappingError(std::string("level ") + level_letter(l) + " is not assigned");

  bool have_r = false, have_c = false;
  m.bmap = {0, 0};
  const std::string_view bbody = std::string_view(s).substr(semi + 3, s.size() - semi - 4);
  for (const auto& [side, dims] : entries(bbody)) {
    DimSet set = 0;
    for (char dc : dims) {
      const DimSet b = dim_bit(dim_from_letter(dc));
      if (set & b) throw MappingError("dimension repeated in block mapping");
      set |= b;
    }
    if (side == 'R' && !have_r) {
      m.bmap.rows = set;
      have_r = true;
    } else if (side == 'C' && !have_c) {
      m.bmap.cols = set;
      have_c = true;
    } else {
      throw MappingError(std::string("unexpected block side '") + side + "'");
    }
  }
  validate_mapping(m);
  return m;
}

std::vector<Mapping> enumerate_mappings(const GemmShape& shape) {
  validate_shape(shape);
  std::vector<Dim> dims;
  for (Dim d : kPrintOrder)
    if (!(shape.is_gemv() && d == Dim::kM)) dims.push_back(d);
  const size_t base = dims.size();
  size_t combos = 1;
  for (size_t i = 0; i < kLevels.size(); ++i) combos *= base;

  std::vector<Mapping> out;
  out.reserve(combos * block_mappings().size());
  for (size_t c = 0; c < combos; ++c) {
    HierarchicalMapping h;
    size_t rem = c;
    for (size_t li = kLevels.size(); li-- > 0;) {
      h.assign[li] = dims[rem % base];
      rem /= base;
    }
    for (const BlockMapping& b : block_mappings()) out.push_back({h, b});
  }
  return out;
}

int64_t per_dim_capacity(int64_t capacity, unsigned count) {
  if (capacity < 1) return 0;
  if (count <= 1) return capacity;
  auto fits = [&](int64_t x) {
    __int128 p = 1;
    for (unsigned i = 0; i < count; ++i) {
      p *= x;
      if (p > capacity) return false;
    }
    return true;
  };
  int64_t lo = 1, hi = capacity;
  while (lo < hi) {
    const int64_t mid = lo + (hi - lo + 1) / 2;
    if (fits(mid))
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

BlockTiling block_tiling(const std::array<int64_t, 3>& tile, const BlockMapping& bmap, int64_t block_rows,
                         int64_t block_cols) {
  const int64_t cap_r = per_dim_capacity(block_rows, static_cast<unsigned>(std::popcount(bmap.rows)));
  const int64_t cap_c = per_dim_capacity(block_cols, static_cast<unsigned>(std::popcount(bmap.cols)));
  if (cap_r < 1 || cap_c < 1) throw std::invalid_argument("block has no capacity");
  BlockTiling t;
  t.total_iterations = 1;
  for (Dim d : kDims) {
    const int64_t x = tile[idx(d)];
    const int64_t cap = bmap.in_rows(d) ? cap_r : cap_c;
    const int64_t it = ceil_div(x, cap);
    t.iterations[idx(d)] = it;
    t.chunk[idx(d)] = ceil_div(x, it);
    t.total_iterations *= it;
  }
  return t;
}

int64_t temporal_iterations(const std::array<int64_t, 3>& tile, const BlockMapping& bmap, int64_t block_rows,
                            int64_t block_cols) {
  return block_tiling(tile, bmap, block_rows, block_cols).total_iterations;
}

Range balanced_part(Range r, int64_t fanout, int64_t i) {
  const int64_t size = r.size();
  const int64_t parts = std::min(fanout, size);
  if (i >= parts || size <= 0) return {r.end, r.end};
  const int64_t base = size / parts;
  const int64_t rem = size % parts;
  const int64_t begin = r.begin + i * base + std::min(i, rem);
  return {begin, begin + base + (i < rem ? 1 : 0)};
}

// Banks holding a non-empty tile: per dimension, the leaves left after the
// balanced splits above the block level. Splits only produce two distinct
// sizes, so ranges are tracked as size -> count.
int64_t TilePlan::active_banks() const {
  int64_t b = 1;
  for (Dim d : kDims) {
    std::map<int64_t, int64_t> cur{{shape.extent(d), 1}};
    for (Level l : {Level::kC, Level::kR, Level::kD, Level::kB}) {
      if (levels[idx(l)].dim != d) continue;
      const int64_t f = levels[idx(l)].fanout;
      std::map<int64_t, int64_t> next;
      for (const auto& [size, count] : cur) {
        const int64_t parts = std::min(f, size);
        const int64_t base = size / parts, rem = size % parts;
        if (rem) next[base + 1] += rem * count;
        if (base) next[base] += (parts - rem) * count;
      }
      cur = std::move(next);
    }
    int64_t leaves = 0;
    for (const auto& kv : cur) leaves += kv.second;
    b *= leaves;
  }
  return b;
}

int64_t TilePlan::upper_k_partials() const {
  int64_t p = 1;
  for (Level l : {Level::kC, Level::kR, Level::kD, Level::kB})
    if (levels[idx(l)].dim == Dim::kK) p *= levels[idx(l)].count;
  return p;
}

int64_t TilePlan::lanes() const {
  int64_t l = 1;
  for (Dim d : kDims)
    if (mapping.bmap.in_cols(d)) l *= tiling.chunk[idx(d)];
  return l;
}

int64_t TilePlan::segments() const {
  if (!column_reduction) return lanes();
  return lanes() / tiling.chunk[idx(Dim::kK)];
}

TilePlan tile(const GemmShape& shape, const Mapping& mapping, const SystemConfig& cfg) {
  validate_shape(shape);
  validate_mapping(mapping);
  TilePlan p;
  p.shape = shape;
  p.mapping = mapping;
  std::array<int64_t, 3> cur{shape.m, shape.k, shape.n};
  for (Level l : kLevels) {
    if (l == Level::kA) p.bank_tile = cur;
    const Dim d = mapping.hmap.at(l);
    const int64_t f = level_fanout(cfg, l);
    LevelSplit s{l, d, f, std::min(f, cur[idx(d)]), ceil_div(cur[idx(d)], f)};
    cur[idx(d)] = s.extent;
    p.levels[idx(l)] = s;
    if (d == Dim::kK) p.reduction_levels.push_back(l);
    p.duplication[0][idx(l)] = d == Dim::kN ? s.count : 1;
    p.duplication[1][idx(l)] = d == Dim::kM ? s.count : 1;
  }
  p.block_tile = cur;
  p.blocks_used = p.levels[idx(Level::kA)].count;
  p.tiling = block_tiling(p.block_tile, mapping.bmap, cfg.dram.rows_per_subarray, cfg.block_width());
  p.temporal_iterations = p.tiling.total_iterations;
  p.column_reduction = mapping.bmap.in_cols(Dim::kK);
  return p;
}

IoPattern infer_io_pattern(const TilePlan& p, const SystemConfig& cfg) {
  IoPattern io;
  const double elem_bytes = static_cast<double>(p.shape.precision) / 8.0;
  const bool bu = cfg.periph.bu_enabled;
  const double m = static_cast<double>(p.shape.m);
  const double n = static_cast<double>(p.shape.n);

  // The dynamic input is replicated once per unit that splits N; broadcast
  // hardware absorbs the bank- and block-level copies.
  double dup = 1;
  for (const LevelSplit& s : p.levels)
    if (s.dim == Dim::kN && (!bu || (s.level != Level::kB && s.level != Level::kA))) dup *= static_cast<double>(s.count);
  if (!bu && p.mapping.bmap.in_cols(Dim::kN)) dup *= static_cast<double>(p.tiling.chunk[idx(Dim::kN)]);
  io.broadcast_bytes = m * static_cast<double>(p.shape.k) * elem_bytes * dup;

  const double upper = static_cast<double>(p.upper_k_partials());
  io.collect_bytes = m * n * 4.0 * upper;

  if (!cfg.periph.pr_enabled) {
    int64_t per_block = 1;
    if (p.levels[idx(Level::kA)].dim == Dim::kK) per_block *= p.blocks_used;
    if (p.column_reduction)
      per_block *= p.tiling.iterations[idx(Dim::kK)] * p.tiling.chunk[idx(Dim::kK)];
    if (per_block > 1) io.host_reduction_bytes = m * n * upper * static_cast<double>(per_block) * 4.0;
  }
  io.phases = (io.broadcast_bytes > 0) + (io.collect_bytes > 0) + (io.host_reduction_bytes > 0);
  io.active_channels = p.levels[idx(Level::kC)].count;
  return io;
}

}  // namespace racam
