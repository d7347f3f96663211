// Copyright 2026 The racam-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "racam/plan_executor.hpp"

#include <algorithm>
#include <stdexcept>

#include "racam/perf_model.hpp"

namespace racam {

namespace {

constexpr size_t kM = static_cast<size_t>(Dim::kM);
constexpr size_t kK = static_cast<size_t>(Dim::kK);
constexpr size_t kN = static_cast<size_t>(Dim::kN);

struct Counters {
  EventTrace trace;
  std::map<std::string, uint64_t> hist{
      {"pim_mul_red", 0}, {"pim_mul", 0}, {"pim_add", 0}, {"pim_add_parallel", 0}};
  uint64_t wraps = 0;

  uint64_t instructions() const {
    uint64_t n = 0;
    for (const auto& [k, v] : hist) n += v;
    return n;
  }
};

// Index space of a set of dimensions, first dimension slowest.
struct IndexSpace {
  std::vector<size_t> dims;
  std::vector<int64_t> extent;
  int64_t size = 1;

  IndexSpace(const TilePlan& p, DimSet set, bool skip_k) {
    for (Dim d : {Dim::kM, Dim::kN, Dim::kK}) {
      if (!(set & dim_bit(d)) || (skip_k && d == Dim::kK)) continue;
      dims.push_back(static_cast<size_t>(d));
      extent.push_back(p.tiling.chunk[static_cast<size_t>(d)]);
      size *= extent.back();
    }
  }
  // Writes local offsets of flat index `i` into `pos`.
  void decode(int64_t i, std::array<int64_t, 3>& pos) const {
    for (size_t j = dims.size(); j-- > 0;) {
      pos[dims[j]] = i % extent[j];
      i /= extent[j];
    }
  }
};

class BlockRunner {
 public:
  BlockRunner(const TilePlan& p, BitSerialEngine& eng, std::span<const uint64_t> a, std::span<const uint64_t> b,
              Counters& ctr)
      : p_(p), eng_(eng), a_(a), b_(b), ctr_(ctr), n_(p.shape.precision) {
    for (size_t d = 0; d < 3; ++d) grid_[d] = p.tiling.iterations[d] * p.tiling.chunk[d];
  }

  // Outputs of one block over its padded M x N grid.
  std::vector<uint64_t> run(const std::array<Range, 3>& r) {
    r_ = r;
    std::vector<uint64_t> out(static_cast<size_t>(grid_[kM] * grid_[kN]), 0);
    const auto& it = p_.tiling.iterations;
    for (int64_t tm = 0; tm < it[kM]; ++tm)
      for (int64_t tn = 0; tn < it[kN]; ++tn) {
        if (p_.column_reduction)
          column_pass(tm, tn, out);
        else
          row_pass(tm, tn, out);
      }
    return out;
  }

 private:
  // Value of A or B at block-local padded coordinates, 0 outside the tile.
  uint64_t a_at(int64_t ml, int64_t kl) const {
    const int64_t m = r_[kM].begin + ml, k = r_[kK].begin + kl;
    if (m >= r_[kM].end || k >= r_[kK].end) return 0;
    return a_[static_cast<size_t>(m * p_.shape.k + k)];
  }
  uint64_t b_at(int64_t kl, int64_t nl) const {
    const int64_t k = r_[kK].begin + kl, n = r_[kN].begin + nl;
    if (k >= r_[kK].end || n >= r_[kN].end) return 0;
    return b_[static_cast<size_t>(k * p_.shape.n + n)];
  }

  void column_pass(int64_t tm, int64_t tn, std::vector<uint64_t>& out) {
    const auto& ch = p_.tiling.chunk;
    const IndexSpace rows(p_, p_.mapping.bmap.rows, true);
    const IndexSpace segs(p_, p_.mapping.bmap.cols, true);
    const int64_t ek = ch[kK];
    const auto lanes = static_cast<size_t>(segs.size * ek);
    std::vector<uint64_t> va(lanes), vb(lanes);
    std::array<int64_t, 3> pos{};

    for (int64_t rg = 0; rg < rows.size; ++rg) {
      std::vector<uint64_t> acc(static_cast<size_t>(segs.size), 0);
      for (int64_t tk = 0; tk < p_.tiling.iterations[kK]; ++tk) {
        rows.decode(rg, pos);
        for (int64_t s = 0; s < segs.size; ++s) {
          segs.decode(s, pos);
          for (int64_t kk = 0; kk < ek; ++kk) {
            const int64_t ml = tm * ch[kM] + pos[kM], nl = tn * ch[kN] + pos[kN], kl = tk * ek + kk;
            const auto lane = static_cast<size_t>(s * ek + kk);
            va[lane] = a_at(ml, kl);
            vb[lane] = b_at(kl, nl);
          }
        }
        auto r = eng_.mul_red(transpose_to_vertical(va, n_), transpose_to_vertical(vb, n_), n_,
                              static_cast<size_t>(segs.size), acc);
        acc = r.sums;
        ctr_.trace += r.trace;
        ++ctr_.hist["pim_mul_red"];
      }
      rows.decode(rg, pos);
      for (int64_t s = 0; s < segs.size; ++s) {
        segs.decode(s, pos);
        const int64_t ml = tm * ch[kM] + pos[kM], nl = tn * ch[kN] + pos[kN];
        out[static_cast<size_t>(ml * grid_[kN] + nl)] += acc[static_cast<size_t>(s)];
      }
    }
  }

  void row_pass(int64_t tm, int64_t tn, std::vector<uint64_t>& out) {
    const auto& ch = p_.tiling.chunk;
    const IndexSpace rows(p_, p_.mapping.bmap.rows, true);
    const IndexSpace cols(p_, p_.mapping.bmap.cols, false);
    const auto lanes = static_cast<size_t>(cols.size);
    const unsigned acc_bits = accumulator_bits(p_);
    std::vector<uint64_t> va(lanes), vb(lanes);
    std::array<int64_t, 3> pos{};

    for (int64_t rg = 0; rg < rows.size; ++rg) {
      BitMatrix acc(lanes, acc_bits);
      for (int64_t tk = 0; tk < p_.tiling.iterations[kK]; ++tk)
        for (int64_t kk = 0; kk < ch[kK]; ++kk) {
          rows.decode(rg, pos);
          const int64_t kl = tk * ch[kK] + kk;
          for (size_t c = 0; c < lanes; ++c) {
            cols.decode(static_cast<int64_t>(c), pos);
            const int64_t ml = tm * ch[kM] + pos[kM], nl = tn * ch[kN] + pos[kN];
            va[c] = a_at(ml, kl);
            vb[c] = b_at(kl, nl);
          }
          auto prod = eng_.mul(transpose_to_vertical(va, n_), transpose_to_vertical(vb, n_), n_);
          ctr_.trace += prod.trace;
          ++ctr_.hist["pim_mul"];
          BitMatrix wide(lanes, acc_bits);
          for (unsigned bit = 0; bit < 2 * n_; ++bit) {
            auto src = prod.value.row(bit);
            std::copy(src.begin(), src.end(), wide.row(bit).begin());
          }
          auto sum = eng_.add_serial(acc, wide, acc_bits);
          ctr_.trace += sum.trace;
          ++ctr_.hist["pim_add"];
          for (unsigned bit = 0; bit < acc_bits; ++bit) {
            auto src = sum.value.row(bit);
            std::copy(src.begin(), src.end(), acc.row(bit).begin());
          }
        }
      rows.decode(rg, pos);
      const auto vals = acc.lane_values();
      for (size_t c = 0; c < lanes; ++c) {
        cols.decode(static_cast<int64_t>(c), pos);
        const int64_t ml = tm * ch[kM] + pos[kM], nl = tn * ch[kN] + pos[kN];
        out[static_cast<size_t>(ml * grid_[kN] + nl)] += vals[c];
      }
    }
  }

  const TilePlan& p_;
  BitSerialEngine& eng_;
  std::span<const uint64_t> a_, b_;
  Counters& ctr_;
  unsigned n_;
  std::array<int64_t, 3> grid_{};
  std::array<Range, 3> r_{};
};

}  // namespace

std::vector<uint64_t> reference_gemm(const GemmShape& s, std::span<const uint64_t> a, std::span<const uint64_t> b) {
  std::vector<uint64_t> c(static_cast<size_t>(s.m * s.n), 0);
  for (int64_t i = 0; i < s.m; ++i)
    for (int64_t k = 0; k < s.k; ++k) {
      const uint64_t av = a[static_cast<size_t>(i * s.k + k)];
      for (int64_t j = 0; j < s.n; ++j) c[static_cast<size_t>(i * s.n + j)] += av * b[static_cast<size_t>(k * s.n + j)];
    }
  return c;
}

PlanExecution execute_plan(const TilePlan& p, const SystemConfig& cfg, std::span<const uint64_t> a,
                           std::span<const uint64_t> b) {
  const GemmShape& s = p.shape;
  if (a.size() != static_cast<size_t>(s.m * s.k) || b.size() != static_cast<size_t>(s.k * s.n))
    throw std::invalid_argument("operand sizes do not match the GEMM shape");

  PlanExecution out;
  out.c.assign(static_cast<size_t>(s.m * s.n), 0);
  BitSerialEngine engine(EngineOptions::from_config(cfg));
  const auto& L = p.levels;
  const size_t lA = static_cast<size_t>(Level::kA);

  int64_t bank_count = 1;
  for (size_t l = 0; l < lA; ++l) bank_count *= L[l].fanout;

  for (int64_t bank = 0; bank < bank_count; ++bank) {
    // Bank coordinates, channel slowest.
    std::array<int64_t, 4> coord{};
    int64_t rem = bank;
    for (size_t l = lA; l-- > 0;) {
      coord[l] = rem % L[l].fanout;
      rem /= L[l].fanout;
    }
    std::array<Range, 3> r{Range{0, s.m}, Range{0, s.k}, Range{0, s.n}};
    bool empty = false;
    for (size_t l = 0; l < lA && !empty; ++l) {
      const auto d = static_cast<size_t>(L[l].dim);
      r[d] = balanced_part(r[d], L[l].fanout, coord[l]);
      empty = r[d].size() == 0;
    }
    if (empty) continue;
    ++out.banks_with_work;

    Counters ctr;
    BlockRunner runner(p, engine, a, b, ctr);
    const auto da = static_cast<size_t>(L[lA].dim);
    std::vector<std::vector<uint64_t>> partials;
    std::vector<std::array<Range, 3>> block_ranges;
    for (int64_t blk = 0; blk < L[lA].fanout; ++blk) {
      std::array<Range, 3> br = r;
      br[da] = balanced_part(r[da], L[lA].fanout, blk);
      if (br[da].size() == 0) continue;
      partials.push_back(runner.run(br));
      block_ranges.push_back(br);
    }

    const int64_t gn = p.tiling.iterations[kN] * p.tiling.chunk[kN];
    auto emit = [&](const std::array<Range, 3>& br, const std::vector<uint64_t>& grid) {
      for (int64_t m = br[kM].begin; m < br[kM].end; ++m)
        for (int64_t n = br[kN].begin; n < br[kN].end; ++n)
          out.c[static_cast<size_t>(m * s.n + n)] +=
              grid[static_cast<size_t>((m - br[kM].begin) * gn + (n - br[kN].begin))];
    };

    if (L[lA].dim == Dim::kK && partials.size() > 1) {
      // Cross-block reduction in the popcount unit's 32-bit adder.
      std::vector<uint64_t> total(partials[0].size());
      for (size_t o = 0; o < total.size(); ++o) {
        int32_t acc = static_cast<int32_t>(static_cast<uint32_t>(partials[0][o]));
        for (size_t blk = 1; blk < partials.size(); ++blk) {
          auto ap = engine.add_parallel(acc, static_cast<int32_t>(static_cast<uint32_t>(partials[blk][o])));
          acc = ap.value;
          ctr.wraps += ap.wrapped;
          ctr.trace += ap.trace;
          ++ctr.hist["pim_add_parallel"];
        }
        total[o] = static_cast<uint32_t>(acc);
      }
      emit(r, total);
    } else {
      for (size_t i = 0; i < partials.size(); ++i) emit(block_ranges[i], partials[i]);
    }

    out.add_parallel_wraps += ctr.wraps;
    out.max_bank_instructions = std::max(out.max_bank_instructions, ctr.instructions());
    if (bank == 0) {
      out.bank0_trace = ctr.trace;
      out.bank0_histogram = ctr.hist;
    }
  }
  return out;
}

}  // namespace racam
