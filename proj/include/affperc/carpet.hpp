#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "affperc/grid.hpp"

namespace affperc {

inline constexpr std::int64_t kDefaultCellCap = 50'000'000;

// One sampled carpet: the selected cells of every level 1..depth, plus the
// inputs needed to regenerate it bit-for-bit.  levels[k-1] holds level k,
// sorted by (col,row); a cell is present iff its whole ancestor chain was
// selected.
struct Realization {
    GridParams params;
    double p = 0.0;
    int depth = 1;
    std::uint64_t seed = 0;
    std::uint64_t copy = 0;
    std::vector<std::vector<Cell>> levels;

    const std::vector<Cell>& cells_at(int level) const {
        if (level < 1 || level > depth) throw std::domain_error("level out of range [1, depth]");
        return levels[static_cast<std::size_t>(level) - 1];
    }
};

// Number of selected rectangles per level; counts[k-1] may never exceed
// n*m*counts[k-2].
struct BranchingCount {
    std::vector<std::int64_t> counts;
};

inline BranchingCount branching_counts(const Realization& r) {
    BranchingCount b;
    b.counts.reserve(r.levels.size());
    for (const auto& lv : r.levels) b.counts.push_back(static_cast<std::int64_t>(lv.size()));
    return b;
}

inline bool survives(const Realization& r) { return !r.levels.back().empty(); }

namespace detail {

inline void check_generation_inputs(const GridParams& params, double p, int depth,
                                    std::int64_t cell_cap) {
    params.validate();
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("selection probability must lie in [0,1], got " + std::to_string(p));
    if (depth < 1) throw std::domain_error("depth must be >= 1");
    (void)params.cols_at(depth);
    (void)params.rows_at(depth);
    // Projected expected cell count (p*n*m)^depth must stay under the cap.
    const double per_level = p * static_cast<double>(params.cells_per_split());
    if (per_level > 1.0) {
        double expected = 1.0;
        for (int k = 1; k <= depth; ++k) {
            expected *= per_level;
            if (expected > static_cast<double>(cell_cap))
                throw resource_error("projected expected cell count exceeds cap of " +
                                     std::to_string(cell_cap) + " at level " + std::to_string(k));
        }
    }
}

// Select children of `parents`, emitting them already sorted by (col,row).
// Parents are grouped by column; sweeping child column index i in the outer
// loop keeps the output globally ordered without a sort.
inline std::vector<Cell> select_children(const GridParams& params, double p, std::uint64_t seed,
                                         std::uint64_t copy, int child_level,
                                         const std::vector<Cell>& parents, std::int64_t cell_cap) {
    std::vector<Cell> out;
    const int n = params.n, m = params.m;
    std::size_t run_begin = 0;
    while (run_begin < parents.size()) {
        std::size_t run_end = run_begin;
        const std::int64_t pcol = parents[run_begin].col;
        while (run_end < parents.size() && parents[run_end].col == pcol) ++run_end;
        for (int i = 0; i < n; ++i) {
            const std::int64_t ccol = pcol * n + i;
            for (std::size_t t = run_begin; t < run_end; ++t) {
                const std::int64_t rbase = parents[t].row * m;
                for (int j = 0; j < m; ++j) {
                    const Cell c{ccol, rbase + j};
                    if (rect_uniform(seed, {child_level, c.col, c.row, copy}) < p) {
                        if (static_cast<std::int64_t>(out.size()) >= cell_cap)
                            throw resource_error("cell cap of " + std::to_string(cell_cap) +
                                                 " exceeded at level " + std::to_string(child_level));
                        out.push_back(c);
                    }
                }
            }
        }
        run_begin = run_end;
    }
    return out;
}

inline std::vector<Cell> full_level(const GridParams& params, int level, std::int64_t cell_cap) {
    const std::int64_t w = params.cols_at(level), h = params.rows_at(level);
    if (w > cell_cap / h)
        throw resource_error("cell cap of " + std::to_string(cell_cap) +
                             " exceeded at forced-full level " + std::to_string(level));
    std::vector<Cell> out;
    out.reserve(static_cast<std::size_t>(w * h));
    for (std::int64_t c = 0; c < w; ++c)
        for (std::int64_t r = 0; r < h; ++r) out.push_back({c, r});
    return out;
}

}  // namespace detail

// Sample the carpet down to `depth`.  Each rectangle is kept iff its own
// address-keyed uniform is below p, so for a fixed seed the selected sets are
// nested across p and extend across depth.
inline Realization generate(const GridParams& params, double p, int depth, std::uint64_t seed,
                            std::uint64_t copy = 0, std::int64_t cell_cap = kDefaultCellCap) {
    detail::check_generation_inputs(params, p, depth, cell_cap);
    Realization r{params, p, depth, seed, copy, {}};
    r.levels.reserve(static_cast<std::size_t>(depth));
    // The unit square is the single level-0 parent.
    const std::vector<Cell> root{{0, 0}};
    r.levels.push_back(detail::select_children(params, p, seed, copy, 1, root, cell_cap));
    for (int k = 2; k <= depth; ++k)
        r.levels.push_back(detail::select_children(params, p, seed, copy, k, r.levels.back(), cell_cap));
    return r;
}

// Variant with every level below k0 forced selected (the process restarted at
// level k0).  force_prefix(..., k0=1) is exactly generate().
inline Realization force_prefix(const GridParams& params, double p, int depth, std::uint64_t seed,
                                int k0, std::uint64_t copy = 0,
                                std::int64_t cell_cap = kDefaultCellCap) {
    if (k0 < 1 || k0 > depth) throw std::domain_error("k0 must lie in [1, depth]");
    detail::check_generation_inputs(params, p, depth, cell_cap);
    Realization r{params, p, depth, seed, copy, {}};
    r.levels.reserve(static_cast<std::size_t>(depth));
    for (int k = 1; k < k0; ++k) r.levels.push_back(detail::full_level(params, k, cell_cap));
    const std::vector<Cell> root{{0, 0}};
    r.levels.push_back(detail::select_children(params, p, seed, copy, k0,
                                               k0 == 1 ? root : r.levels[k0 - 2], cell_cap));
    for (int k = k0 + 1; k <= depth; ++k)
        r.levels.push_back(detail::select_children(params, p, seed, copy, k, r.levels.back(), cell_cap));
    return r;
}

namespace detail {

inline bool probe_subtree(const GridParams& params, double p, int depth, std::uint64_t seed,
                          std::uint64_t copy, int level, std::int64_t col, std::int64_t row) {
    if (level == depth) return true;
    const int n = params.n, m = params.m;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            const std::int64_t cc = col * n + i, rr = row * m + j;
            if (rect_uniform(seed, {level + 1, cc, rr, copy}) < p &&
                probe_subtree(params, p, depth, seed, copy, level + 1, cc, rr))
                return true;
        }
    return false;
}

}  // namespace detail

// Equivalent to survives(generate(...)) but explores lineages depth-first and
// stops at the first one reaching `depth`, so no level is materialized.  Same
// per-rectangle uniforms, hence exactly the same answer.
inline bool survival_probe(const GridParams& params, double p, int depth, std::uint64_t seed,
                           std::uint64_t copy = 0) {
    detail::check_generation_inputs(params, p, depth, /*cell_cap=*/INT64_MAX);
    return detail::probe_subtree(params, p, depth, seed, copy, 0, 0, 0);
}

}  // namespace affperc
