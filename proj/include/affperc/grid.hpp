#pragma once

#include <cstdint>
#include <compare>
#include <optional>
#include <stdexcept>
#include <string>

#include "affperc/rng.hpp"

namespace affperc {

// Thrown when a generation would exceed the configured cell budget.
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown on malformed serialized input (carries what the parser saw and where).
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// n^e if it fits in a signed 64-bit integer.
inline std::optional<std::int64_t> checked_pow(std::int64_t base, int exp) {
    std::int64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > INT64_MAX / base) return std::nullopt;
        r *= base;
    }
    return r;
}

// Subdivision shape: every rectangle splits into n columns by m rows, m > n >= 2.
struct GridParams {
    int n = 2;
    int m = 3;

    void validate() const {
        if (!(m > n && n >= 2))
            throw std::domain_error("grid shape requires m > n >= 2, got n=" + std::to_string(n) +
                                    " m=" + std::to_string(m));
    }

    bool operator==(const GridParams&) const = default;

    std::int64_t cells_per_split() const { return std::int64_t(n) * m; }

    // Level-k grid is n^k columns by m^k rows; throws if that overflows.
    std::int64_t cols_at(int level) const {
        auto v = checked_pow(n, level);
        if (!v) throw std::domain_error("level too deep: n^level overflows");
        return *v;
    }
    std::int64_t rows_at(int level) const {
        auto v = checked_pow(m, level);
        if (!v) throw std::domain_error("level too deep: m^level overflows");
        return *v;
    }
};

// One selected cell of a level-k grid, addressed by (column, row).
struct Cell {
    std::int64_t col = 0;
    std::int64_t row = 0;
    auto operator<=>(const Cell&) const = default;
};

// Absolute address of a rectangle: level k >= 1, position in the level-k grid,
// and a domain-copy index (0 for the unit square, 1 for the second copy of a
// doubled domain).
struct RectAddr {
    int level = 1;
    std::int64_t col = 0;
    std::int64_t row = 0;
    std::uint64_t copy = 0;
};

// Deterministic per-rectangle uniform in [0,1).  A counter-style keyed hash of
// the full address, so draws are independent of evaluation order and two
// realizations sharing (seed, copy) agree on every rectangle they both visit.
inline double rect_uniform(std::uint64_t seed, const RectAddr& addr) noexcept {
    std::uint64_t h = seed;
    h = absorb(h, addr.copy);
    h = absorb(h, static_cast<std::uint64_t>(addr.level));
    h = absorb(h, static_cast<std::uint64_t>(addr.col));
    h = absorb(h, static_cast<std::uint64_t>(addr.row));
    return bits_to_unit(h);
}

}  // namespace affperc
