#pragma once

// Independent reference implementations used only to check the library:
// breadth-first flood-fill labeling, direct binomial sums, and a plain
// std::mt19937_64 Galton-Watson simulator.  Nothing here may call into the
// code paths under test.

#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "affperc/grid.hpp"

namespace oracle {

using affperc::Cell;

// BFS flood fill; label of a cell is the smallest cell of its component.
inline std::map<Cell, Cell> flood_fill_labels(const std::vector<Cell>& cells, bool corners) {
    std::set<Cell> todo(cells.begin(), cells.end());
    std::map<Cell, Cell> label;
    while (!todo.empty()) {
        const Cell start = *todo.begin();
        std::vector<Cell> member;
        std::queue<Cell> q;
        q.push(start);
        todo.erase(todo.begin());
        while (!q.empty()) {
            const Cell c = q.front();
            q.pop();
            member.push_back(c);
            for (int dc = -1; dc <= 1; ++dc)
                for (int dr = -1; dr <= 1; ++dr) {
                    if (dc == 0 && dr == 0) continue;
                    if (!corners && dc != 0 && dr != 0) continue;
                    const Cell nb{c.col + dc, c.row + dr};
                    auto it = todo.find(nb);
                    if (it != todo.end()) {
                        todo.erase(it);
                        q.push(nb);
                    }
                }
        }
        Cell smallest = member.front();
        for (const Cell& c : member)
            if (c < smallest) smallest = c;
        for (const Cell& c : member) label[c] = smallest;
    }
    return label;
}

// P(Bin(n, q) >= k_min) by direct summation.
inline double binomial_tail_ge(int k_min, int n, double q) {
    double total = 0.0;
    for (int k = k_min; k <= n; ++k) {
        double comb = 1.0;
        for (int i = 0; i < k; ++i) comb = comb * (n - i) / (i + 1);
        total += comb * std::pow(q, k) * std::pow(1.0 - q, n - k);
    }
    return total;
}

// Population size of a Galton-Watson process with Bin(nm, p) offspring after
// `depth` generations, capped to keep runaway supercritical runs cheap.
inline std::int64_t gw_population(int nm, double p, int depth, std::mt19937_64& rng,
                                  std::int64_t cap = 1'000'000) {
    std::int64_t pop = 1;
    for (int k = 0; k < depth && pop > 0; ++k) {
        if (pop > cap) return cap;  // certainly alive; exact count no longer matters
        std::binomial_distribution<std::int64_t> offspring(nm, p);
        std::int64_t next = 0;
        for (std::int64_t i = 0; i < pop; ++i) next += offspring(rng);
        pop = next;
    }
    return pop;
}

// chi-square statistic of equally-likely bins.
inline double chi_square_uniform(const std::vector<std::int64_t>& bin_counts, std::int64_t total) {
    const double expected = static_cast<double>(total) / static_cast<double>(bin_counts.size());
    double stat = 0.0;
    for (std::int64_t c : bin_counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

// 0.999 quantiles of the chi-square distribution.
inline constexpr double kChi2Crit999_df9 = 27.877;
inline constexpr double kChi2Crit999_df99 = 148.230;

}  // namespace oracle
