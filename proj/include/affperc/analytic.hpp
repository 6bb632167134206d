#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "affperc/connectivity.hpp"
#include "affperc/grid.hpp"

namespace affperc {

inline constexpr double kFixedPointTol = 1e-12;
inline constexpr int kFixedPointMaxIter = 100'000;
// A j-full iteration limit below this counts as having collapsed to zero.
inline constexpr double kJfullPositiveEps = 1e-6;

struct ExtinctionResult {
    double t = 1.0;        // P(the carpet is empty)
    double survival = 0.0; // 1 - t
    int iterations = 0;
    bool converged = true; // false flags a near-critical run that hit the cap
};

// Least non-negative root of t = (p*t + 1 - p)^{mn}, found by monotone
// fixed-point iteration from 0.  The map is increasing and continuous, so the
// iterates climb to the least fixed point; at p = 1/(mn) convergence is
// sublinear and the iteration cap applies.
inline ExtinctionResult extinction_prob(int n, int m, double p) {
    GridParams{n, m}.validate();
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("p must lie in [0,1]");
    const double mn = static_cast<double>(m) * n;
    double t = 0.0;
    ExtinctionResult out;
    for (int i = 1; i <= kFixedPointMaxIter; ++i) {
        const double next = std::pow(p * t + 1.0 - p, mn);
        out.iterations = i;
        if (std::abs(next - t) < kFixedPointTol) {
            out.t = next;
            out.survival = 1.0 - next;
            return out;
        }
        t = next;
    }
    out.t = t;
    out.survival = 1.0 - t;
    out.converged = false;
    return out;
}

struct Dimensions {
    double dim_hb = 0.0;      // common Hausdorff/box dimension, given non-extinction
    double dim_assouad = 2.0;
};

// Piecewise dimension formula; defined only above the extinction threshold.
inline Dimensions dimensions(int n, int m, double p) {
    GridParams{n, m}.validate();
    const double mn = static_cast<double>(m) * n;
    if (!(p > 1.0 / mn && p <= 1.0))
        throw std::domain_error("dimensions defined for 1/(mn) < p <= 1 only");
    Dimensions d;
    if (p <= 1.0 / m)
        d.dim_hb = std::log(p * n * m) / std::log(static_cast<double>(n));
    else
        d.dim_hb = std::log(p * m * m) / std::log(static_cast<double>(m));
    return d;
}

// One step of the j-full recursion:
//   f_p(t) = mn p^{mn-1} t^{mn-1} - (mn-1) p^{mn} t^{mn},
// the probability that at least mn-1 of mn independent trials with success
// probability p*t succeed.  Evaluated via u = p*t as u^{mn-1} (mn - (mn-1)u).
inline double jfull_map(int n, int m, double p, double t) {
    GridParams{n, m}.validate();
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("p must lie in [0,1]");
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("t must lie in [0,1]");
    const int mn = m * n;
    const double u = p * t;
    return std::pow(u, mn - 1) * (mn - (mn - 1) * u);
}

struct JfullResult {
    double limit = 0.0;
    int iterations = 0;
    bool converged = true;
};

namespace detail {

inline void require_jfull_supported(int n, int m) {
    GridParams{n, m}.validate();
    if (n < 3)
        throw std::domain_error(
            "j-full quantities need n >= 3: a 2-column subdivision missing one cell need not "
            "connect to its neighbours, so 'full' would have to mean something stronger there");
}

}  // namespace detail

// Limit of p_j = f_p(p_{j-1}) from p_0 = 1.  f_p is increasing on [0,1], so
// the sequence is monotone non-increasing; it ends at a stable fixed point in
// (0,1] for p close to 1 and collapses to 0 otherwise.
inline JfullResult jfull_limit(int n, int m, double p) {
    detail::require_jfull_supported(n, m);
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("p must lie in [0,1]");
    double t = 1.0;
    JfullResult out;
    for (int j = 1; j <= kFixedPointMaxIter; ++j) {
        const double next = jfull_map(n, m, p, t);
        out.iterations = j;
        if (std::abs(next - t) < kFixedPointTol) {
            out.limit = next;
            return out;
        }
        t = next;
    }
    out.limit = t;
    out.converged = false;
    return out;
}

// Smallest p (to width tol) whose j-full limit is positive, i.e. an upper
// bound on the crossing critical probability: being j-full for every j forces
// crossings at every level.  Returns the upper bracket end.
inline double crossing_upper_bound(int n, int m, double tol) {
    detail::require_jfull_supported(n, m);
    if (!(tol > 0.0)) throw std::domain_error("tol must be positive");
    const auto positive = [&](double p) {
        const JfullResult r = jfull_limit(n, m, p);
        return r.converged && r.limit > kJfullPositiveEps;
    };
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (positive(mid) ? hi : lo) = mid;
    }
    return hi;
}

// P(some row of a width n^{-j} column is fully selected at level q)
//   = 1 - (1 - p^{n^{q-j}})^{m^q},
// evaluated in log space since p^{n^{q-j}} underflows already for modest q.
inline double full_row_prob(int n, int m, double p, int q, int j) {
    GridParams{n, m}.validate();
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("p must lie in [0,1]");
    if (!(q >= j && j >= 0)) throw std::domain_error("need q >= j >= 0");
    if (p == 1.0) return 1.0;
    if (p == 0.0) return 0.0;
    const double cells_per_row = std::pow(static_cast<double>(n), q - j);
    const double rows = std::pow(static_cast<double>(m), q);
    const double log_row_full = cells_per_row * std::log(p);  // log p^{n^{q-j}}
    if (log_row_full < -700.0) {
        // 1 - (1-u)^M ~ M u for tiny u; stay in logs to dodge the underflow.
        const double log_val = std::log(rows) + log_row_full;
        return log_val < 0.0 ? std::exp(log_val) : 1.0;
    }
    return -std::expm1(rows * std::log1p(-std::exp(log_row_full)));
}

struct TauBounds {
    double h_bound = 0.0;  // lower bound for the tall-domain H-crossing probability
    double v_bound = 0.0;  // lower bound for the wide-domain V-crossing probability
};

// Universal positive lower bounds (4m)^{-n/(n-1)} and (4n)^{-m/(m-1)} for the
// doubled-domain crossing probabilities whenever they are nonzero.
inline TauBounds tau_lower_bound(int n, int m) {
    GridParams{n, m}.validate();
    return {std::pow(4.0 * m, -static_cast<double>(n) / (n - 1)),
            std::pow(4.0 * n, -static_cast<double>(m) / (m - 1))};
}

// Exact level-1 crossing probability by enumeration of all 2^{nm} subsets of
// the n x m grid: sum of p^|S| (1-p)^{nm-|S|} over subsets containing a
// crossing.  The per-subset check is a bit-parallel flood fill.
inline double exact_level1_crossing(int n, int m, double p, Direction dir,
                                    AdjacencyMode mode = AdjacencyMode::edge_corner) {
    // Pure grid combinatorics, so square shapes are allowed here too.
    if (n < 1 || m < 1) throw std::domain_error("grid must be at least 1x1");
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("p must lie in [0,1]");
    const int nm = n * m;
    if (nm > 25) throw std::domain_error("exact enumeration limited to nm <= 25 cells");

    // cell (c, r) <-> bit r*n + c
    std::vector<std::uint32_t> nbr(static_cast<std::size_t>(nm), 0);
    std::uint32_t src_mask = 0, dst_mask = 0;
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c) {
            const int b = r * n + c;
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    if (mode == AdjacencyMode::edge && dr != 0 && dc != 0) continue;
                    const int cc = c + dc, rr = r + dr;
                    if (cc < 0 || cc >= n || rr < 0 || rr >= m) continue;
                    nbr[b] |= 1u << (rr * n + cc);
                }
            const int coord = dir == Direction::H ? c : r;
            const int last = dir == Direction::H ? n - 1 : m - 1;
            if (coord == 0) src_mask |= 1u << b;
            if (coord == last) dst_mask |= 1u << b;
        }

    // Count crossing subsets by cardinality; the counts are exact integers.
    std::vector<std::uint64_t> by_size(static_cast<std::size_t>(nm) + 1, 0);
    const std::uint32_t all = nm == 32 ? ~0u : (1u << nm) - 1u;
    for (std::uint32_t s = 1; s <= all; ++s) {
        std::uint32_t reach = s & src_mask;
        if (!reach || !(s & dst_mask)) continue;
        for (;;) {
            std::uint32_t grown = reach;
            std::uint32_t frontier = reach;
            while (frontier) {
                const int b = std::countr_zero(frontier);
                frontier &= frontier - 1;
                grown |= nbr[b] & s;
            }
            if (grown == reach) break;
            reach = grown;
            if (reach & dst_mask) break;
        }
        if (reach & dst_mask) ++by_size[static_cast<std::size_t>(std::popcount(s))];
    }
    double total = 0.0;
    for (int k = 1; k <= nm; ++k)
        if (by_size[k]) total += static_cast<double>(by_size[k]) * std::pow(p, k) *
                                 std::pow(1.0 - p, nm - k);
    return total;
}

struct AnalyticReport {
    int n = 0;
    int m = 0;
    double p = 0.0;
    double extinction_t = 1.0;
    double survival = 0.0;
    std::optional<double> dim_hb;       // absent when the carpet is a.s. empty
    std::optional<double> dim_assouad;  // likewise
    std::optional<double> jfull_limit;  // absent for n = 2
    std::optional<double> p_A;          // likewise
    double tau_h_bound = 0.0;
    double tau_v_bound = 0.0;
};

inline AnalyticReport analytic_report(int n, int m, double p, double p_a_tol = 1e-4) {
    GridParams{n, m}.validate();
    AnalyticReport rep;
    rep.n = n;
    rep.m = m;
    rep.p = p;
    const ExtinctionResult ext = extinction_prob(n, m, p);
    rep.extinction_t = ext.t;
    rep.survival = ext.survival;
    if (p > 1.0 / (static_cast<double>(m) * n)) {
        const Dimensions d = dimensions(n, m, p);
        rep.dim_hb = d.dim_hb;
        rep.dim_assouad = d.dim_assouad;
    }
    if (n >= 3) {
        rep.jfull_limit = jfull_limit(n, m, p).limit;
        rep.p_A = crossing_upper_bound(n, m, p_a_tol);
    }
    const TauBounds tb = tau_lower_bound(n, m);
    rep.tau_h_bound = tb.h_bound;
    rep.tau_v_bound = tb.v_bound;
    return rep;
}

}  // namespace affperc
