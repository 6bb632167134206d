#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "affperc/carpet.hpp"
#include "affperc/grid.hpp"
#include "affperc/union_find.hpp"

namespace affperc {

// edge: cells are adjacent only across a shared edge.
// edge_corner: adjacent whenever their closures intersect, i.e. corner contact
// counts too.  This is the faithful adjacency for unions of closed rectangles.
enum class AdjacencyMode { edge, edge_corner };

enum class Direction { H, V };

// Domain the crossing is evaluated on: the unit square, or two stacked /
// side-by-side independent copies of it.
enum class Layout { unit, two_tall, two_wide };

struct ComponentCensus {
    int level = 0;
    std::int64_t num_components = 0;
    std::int64_t num_nontrivial = 0;
    std::int64_t num_touching_boundary = 0;
    std::int64_t num_islands = 0;
    std::int64_t largest_size = 0;
    bool crossing_h = false;
    bool crossing_v = false;
};

namespace detail {

inline constexpr std::int64_t kDenseIndexLimit = std::int64_t{1} << 24;

// Cell -> position lookup.  Uses a flat table when the grid is small enough,
// otherwise a sorted view with binary search.
class CellIndex {
public:
    CellIndex(std::span<const Cell> cells, std::int64_t w, std::int64_t h)
        : cells_(cells), w_(w), h_(h) {
        for (const Cell& c : cells) {
            if (c.col < 0 || c.col >= w || c.row < 0 || c.row >= h)
                throw std::domain_error("cell (" + std::to_string(c.col) + "," +
                                        std::to_string(c.row) + ") outside grid " +
                                        std::to_string(w) + "x" + std::to_string(h));
        }
        if (h != 0 && w <= kDenseIndexLimit / h) {
            dense_.assign(static_cast<std::size_t>(w * h), -1);
            for (std::size_t i = 0; i < cells.size(); ++i) {
                auto& slot = dense_[flat(cells[i])];
                if (slot != -1) throw std::domain_error("duplicate cell in input set");
                slot = static_cast<std::int32_t>(i);
            }
        } else {
            order_.resize(cells.size());
            for (std::size_t i = 0; i < cells.size(); ++i) order_[i] = static_cast<std::uint32_t>(i);
            std::sort(order_.begin(), order_.end(),
                      [&](std::uint32_t a, std::uint32_t b) { return cells[a] < cells[b]; });
            for (std::size_t i = 1; i < order_.size(); ++i)
                if (cells[order_[i - 1]] == cells[order_[i]])
                    throw std::domain_error("duplicate cell in input set");
        }
    }

    // Index of the cell in the input span, or -1.
    std::int32_t find(Cell c) const {
        if (c.col < 0 || c.col >= w_ || c.row < 0 || c.row >= h_) return -1;
        if (!dense_.empty()) return dense_[flat(c)];
        auto it = std::lower_bound(order_.begin(), order_.end(), c, [&](std::uint32_t a, Cell v) {
            return cells_[a] < v;
        });
        if (it == order_.end() || !(cells_[*it] == c)) return -1;
        return static_cast<std::int32_t>(*it);
    }

private:
    std::size_t flat(Cell c) const { return static_cast<std::size_t>(c.row * w_ + c.col); }

    std::span<const Cell> cells_;
    std::int64_t w_, h_;
    std::vector<std::int32_t> dense_;
    std::vector<std::uint32_t> order_;
};

inline std::span<const std::array<int, 2>> half_neighborhood(AdjacencyMode mode) {
    // Offsets covering each adjacent pair exactly once.
    static constexpr std::array<std::array<int, 2>, 2> edge{{{-1, 0}, {0, -1}}};
    static constexpr std::array<std::array<int, 2>, 4> corner{
        {{-1, 0}, {0, -1}, {-1, -1}, {1, -1}}};
    if (mode == AdjacencyMode::edge) return {edge.data(), edge.size()};
    return {corner.data(), corner.size()};
}

inline void unite_adjacent(UnionFind& uf, std::span<const Cell> cells, const CellIndex& index,
                           AdjacencyMode mode) {
    const auto offsets = half_neighborhood(mode);
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (const auto& d : offsets) {
            const std::int32_t j = index.find({cells[i].col + d[0], cells[i].row + d[1]});
            if (j >= 0) uf.unite(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
        }
}

}  // namespace detail

// Connected-component labels for a sparse cell set on a w x h grid.  Entry i
// is the index (into `cells`) of the lexicographically smallest cell of the
// component containing cells[i], so labels are canonical.
inline std::vector<std::uint32_t> label_components(std::span<const Cell> cells, std::int64_t w,
                                                   std::int64_t h, AdjacencyMode mode) {
    detail::CellIndex index(cells, w, h);
    UnionFind uf(cells.size());
    detail::unite_adjacent(uf, cells, index, mode);
    std::vector<std::int32_t> best(cells.size(), -1);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::uint32_t root = uf.find(static_cast<std::uint32_t>(i));
        if (best[root] < 0 || cells[i] < cells[best[root]]) best[root] = static_cast<std::int32_t>(i);
    }
    std::vector<std::uint32_t> label(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
        label[i] = static_cast<std::uint32_t>(best[uf.find(static_cast<std::uint32_t>(i))]);
    return label;
}

// Whether the cell set joins the two opposite sides of the grid.  Two virtual
// nodes are united with the boundary cells so the query is a single find pair.
inline bool crossing_cells(std::span<const Cell> cells, std::int64_t w, std::int64_t h,
                           Direction dir, AdjacencyMode mode) {
    if (cells.empty()) return false;
    detail::CellIndex index(cells, w, h);
    const auto source = static_cast<std::uint32_t>(cells.size());
    const auto sink = source + 1;
    UnionFind uf(cells.size() + 2);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::int64_t lo = dir == Direction::H ? cells[i].col : cells[i].row;
        const std::int64_t end = dir == Direction::H ? w - 1 : h - 1;
        if (lo == 0) uf.unite(source, static_cast<std::uint32_t>(i));
        if (lo == end) uf.unite(sink, static_cast<std::uint32_t>(i));
    }
    detail::unite_adjacent(uf, cells, index, mode);
    return uf.connected(source, sink);
}

// Crossing of E_k for one realization on the unit square.
inline bool crossing(const Realization& r, int level, Direction dir, AdjacencyMode mode) {
    return crossing_cells(r.cells_at(level), r.params.cols_at(level), r.params.rows_at(level), dir,
                          mode);
}

// Crossing of E_k on a possibly doubled domain.  For two-copy layouts the
// second realization is shifted one unit square up (two_tall) or right
// (two_wide); connections across the interface happen naturally on the merged
// grid.
inline bool crossing_domain(std::span<const Realization> realizations, Layout layout, int level,
                            Direction dir, AdjacencyMode mode) {
    const std::size_t need = layout == Layout::unit ? 1 : 2;
    if (realizations.size() != need)
        throw std::domain_error("layout expects " + std::to_string(need) + " realization(s), got " +
                                std::to_string(realizations.size()));
    const Realization& r0 = realizations[0];
    if (layout == Layout::unit) return crossing(r0, level, dir, mode);

    const Realization& r1 = realizations[1];
    if (!(r0.params == r1.params)) throw std::domain_error("copies must share grid parameters");
    if (r0.copy == r1.copy) throw std::domain_error("copies must have distinct copy indices");
    std::int64_t w = r0.params.cols_at(level);
    std::int64_t h = r0.params.rows_at(level);
    const std::int64_t col_off = layout == Layout::two_wide ? w : 0;
    const std::int64_t row_off = layout == Layout::two_tall ? h : 0;
    std::vector<Cell> merged;
    merged.reserve(r0.cells_at(level).size() + r1.cells_at(level).size());
    for (const Cell& c : r0.cells_at(level)) merged.push_back(c);
    for (const Cell& c : r1.cells_at(level)) merged.push_back({c.col + col_off, c.row + row_off});
    w += col_off;
    h += row_off;
    return crossing_cells(merged, w, h, dir, mode);
}

// Component statistics of E_k: counts, boundary contact, islands (components
// touching no boundary row or column) and both crossing indicators.
inline ComponentCensus census_cells(std::span<const Cell> cells, std::int64_t w, std::int64_t h,
                                    int level, AdjacencyMode mode) {
    detail::CellIndex index(cells, w, h);
    UnionFind uf(cells.size());
    detail::unite_adjacent(uf, cells, index, mode);

    struct Agg {
        std::int64_t size = 0;
        bool left = false, right = false, top = false, bottom = false;
    };
    std::vector<std::int32_t> slot(cells.size(), -1);
    std::vector<Agg> agg;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::uint32_t root = uf.find(static_cast<std::uint32_t>(i));
        if (slot[root] < 0) {
            slot[root] = static_cast<std::int32_t>(agg.size());
            agg.emplace_back();
        }
        Agg& a = agg[static_cast<std::size_t>(slot[root])];
        ++a.size;
        a.left |= cells[i].col == 0;
        a.right |= cells[i].col == w - 1;
        a.bottom |= cells[i].row == 0;
        a.top |= cells[i].row == h - 1;
    }
    ComponentCensus out;
    out.level = level;
    out.num_components = static_cast<std::int64_t>(agg.size());
    for (const Agg& a : agg) {
        if (a.size >= 2) ++out.num_nontrivial;
        if (a.left || a.right || a.top || a.bottom) ++out.num_touching_boundary;
        out.largest_size = std::max(out.largest_size, a.size);
        out.crossing_h |= a.left && a.right;
        out.crossing_v |= a.bottom && a.top;
    }
    out.num_islands = out.num_components - out.num_touching_boundary;
    return out;
}

inline ComponentCensus census(const Realization& r, int level, AdjacencyMode mode) {
    return census_cells(r.cells_at(level), r.params.cols_at(level), r.params.rows_at(level), level,
                        mode);
}

}  // namespace affperc
