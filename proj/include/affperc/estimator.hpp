#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "affperc/carpet.hpp"
#include "affperc/connectivity.hpp"
#include "affperc/stats.hpp"

namespace affperc {

struct CrossingEstimate {
    GridParams params;
    double p = 0.0;
    int level = 1;
    Layout domain = Layout::unit;
    Direction direction = Direction::H;
    std::int64_t trials = 0;
    std::int64_t hits = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t master_seed = 0;
};

struct SurvivalEstimate {
    GridParams params;
    double p = 0.0;
    int level = 1;
    std::int64_t trials = 0;
    std::int64_t hits = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t master_seed = 0;
};

struct SweepResult {
    std::vector<CrossingEstimate> points;
    bool coupled = false;
};

struct CriticalBracket {
    GridParams params;
    Direction direction = Direction::H;
    Layout domain = Layout::unit;
    int level = 1;
    double threshold = 0.5;
    double lo = 0.0;
    double hi = 1.0;
    std::int64_t trials_per_step = 0;
    std::vector<std::pair<double, double>> history;  // (p, p_hat) in evaluation order
    std::uint64_t master_seed = 0;
};

struct HvComparison {
    GridParams params;
    double p = 0.0;
    int level = 1;
    std::int64_t trials = 0;
    PairedCounts counts;
    double p_hat_h = 0.0;
    double p_hat_v = 0.0;
    double diff = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t master_seed = 0;
};

namespace detail {

inline int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Run fn(acc, trial) for every trial in [0, trials), splitting the range into
// contiguous chunks.  Accumulators are merged in chunk order, and every
// per-trial result is a pure function of the trial index, so the outcome is
// identical for any thread count.
template <typename Acc, typename Fn>
Acc run_trials(std::int64_t trials, int threads, Fn fn) {
    const int t = std::min<std::int64_t>(resolve_threads(threads), std::max<std::int64_t>(trials, 1));
    std::vector<Acc> parts(static_cast<std::size_t>(t));
    if (t == 1) {
        for (std::int64_t i = 0; i < trials; ++i) fn(parts[0], i);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(t));
        std::exception_ptr error;
        std::mutex error_mu;
        for (int w = 0; w < t; ++w) {
            const std::int64_t begin = trials * w / t;
            const std::int64_t end = trials * (w + 1) / t;
            workers.emplace_back([&, w, begin, end] {
                try {
                    for (std::int64_t i = begin; i < end; ++i) fn(parts[static_cast<std::size_t>(w)], i);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!error) error = std::current_exception();
                }
            });
        }
        for (auto& th : workers) th.join();
        if (error) std::rethrow_exception(error);
    }
    Acc total{};
    for (const Acc& a : parts) total.merge(a);
    return total;
}

struct HitAcc {
    std::int64_t hits = 0;
    void merge(const HitAcc& o) { hits += o.hits; }
};

struct HitVecAcc {
    std::vector<std::int64_t> hits;
    void merge(const HitVecAcc& o) {
        if (hits.size() < o.hits.size()) hits.resize(o.hits.size(), 0);
        for (std::size_t i = 0; i < o.hits.size(); ++i) hits[i] += o.hits[i];
    }
};

struct PairAcc {
    PairedCounts counts;
    void merge(const PairAcc& o) {
        counts.n11 += o.counts.n11;
        counts.n10 += o.counts.n10;
        counts.n01 += o.counts.n01;
        counts.n00 += o.counts.n00;
    }
};

inline std::vector<Realization> trial_realizations(const GridParams& params, double p, int level,
                                                   Layout domain, std::uint64_t trial_seed,
                                                   std::int64_t cell_cap) {
    std::vector<Realization> rs;
    rs.push_back(generate(params, p, level, trial_seed, /*copy=*/0, cell_cap));
    if (domain != Layout::unit) rs.push_back(generate(params, p, level, trial_seed, /*copy=*/1, cell_cap));
    return rs;
}

}  // namespace detail

// Monte Carlo estimate of the level-k crossing probability on the given
// domain.  Trial i draws its seed from (master_seed, i); the two copies of a
// doubled domain share the trial seed and differ in the copy index.
inline CrossingEstimate estimate_crossing(const GridParams& params, double p, int level,
                                          std::int64_t trials, Direction direction, Layout domain,
                                          AdjacencyMode mode, std::uint64_t master_seed,
                                          int threads = 0, std::int64_t cell_cap = kDefaultCellCap) {
    if (trials < 1) throw std::domain_error("trials must be >= 1");
    detail::check_generation_inputs(params, p, level, cell_cap);
    const auto acc = detail::run_trials<detail::HitAcc>(
        trials, threads, [&](detail::HitAcc& a, std::int64_t i) {
            const auto rs = detail::trial_realizations(params, p, level, domain,
                                                       derive_seed(master_seed, static_cast<std::uint64_t>(i)),
                                                       cell_cap);
            if (crossing_domain(rs, domain, level, direction, mode)) ++a.hits;
        });
    CrossingEstimate est{params, p, level, domain, direction, trials, acc.hits, 0.0, 0.0, 0.0,
                         master_seed};
    est.p_hat = static_cast<double>(acc.hits) / static_cast<double>(trials);
    const Interval ci = wilson_interval(acc.hits, trials);
    est.ci_low = ci.low;
    est.ci_high = ci.high;
    return est;
}

// Same trial scheme with survival of E_level as the event.
inline SurvivalEstimate estimate_survival(const GridParams& params, double p, int level,
                                          std::int64_t trials, std::uint64_t master_seed,
                                          int threads = 0) {
    if (trials < 1) throw std::domain_error("trials must be >= 1");
    const auto acc = detail::run_trials<detail::HitAcc>(
        trials, threads, [&](detail::HitAcc& a, std::int64_t i) {
            if (survival_probe(params, p, level, derive_seed(master_seed, static_cast<std::uint64_t>(i))))
                ++a.hits;
        });
    SurvivalEstimate est{params, p, level, trials, acc.hits, 0.0, 0.0, 0.0, master_seed};
    est.p_hat = static_cast<double>(acc.hits) / static_cast<double>(trials);
    const Interval ci = wilson_interval(acc.hits, trials);
    est.ci_low = ci.low;
    est.ci_high = ci.high;
    return est;
}

// Estimate the crossing probability over an ascending grid of p values.  When
// coupled, every p reuses the same per-rectangle uniforms (a cell is selected
// iff its uniform is below p), so the per-trial hit indicators - and hence
// p_hat - are non-decreasing in p by construction, not just on average.
inline SweepResult sweep(const GridParams& params, const std::vector<double>& p_grid, int level,
                         std::int64_t trials, Direction direction, Layout domain,
                         AdjacencyMode mode, bool coupled, std::uint64_t master_seed,
                         int threads = 0, std::int64_t cell_cap = kDefaultCellCap) {
    if (trials < 1) throw std::domain_error("trials must be >= 1");
    if (p_grid.empty()) throw std::domain_error("p grid must be non-empty");
    if (!std::is_sorted(p_grid.begin(), p_grid.end()))
        throw std::domain_error("p grid must be sorted ascending");
    for (double p : p_grid) detail::check_generation_inputs(params, p, level, cell_cap);

    detail::HitVecAcc acc;
    if (coupled) {
        acc = detail::run_trials<detail::HitVecAcc>(
            trials, threads, [&](detail::HitVecAcc& a, std::int64_t i) {
                if (a.hits.empty()) a.hits.assign(p_grid.size(), 0);
                const std::uint64_t trial_seed = derive_seed(master_seed, static_cast<std::uint64_t>(i));
                for (std::size_t g = 0; g < p_grid.size(); ++g) {
                    const auto rs =
                        detail::trial_realizations(params, p_grid[g], level, domain, trial_seed, cell_cap);
                    if (crossing_domain(rs, domain, level, direction, mode)) ++a.hits[g];
                }
            });
    } else {
        acc = detail::run_trials<detail::HitVecAcc>(
            trials, threads, [&](detail::HitVecAcc& a, std::int64_t i) {
                if (a.hits.empty()) a.hits.assign(p_grid.size(), 0);
                for (std::size_t g = 0; g < p_grid.size(); ++g) {
                    const std::uint64_t trial_seed = derive_seed(
                        master_seed, static_cast<std::uint64_t>(g) * static_cast<std::uint64_t>(trials) +
                                         static_cast<std::uint64_t>(i));
                    const auto rs =
                        detail::trial_realizations(params, p_grid[g], level, domain, trial_seed, cell_cap);
                    if (crossing_domain(rs, domain, level, direction, mode)) ++a.hits[g];
                }
            });
    }
    SweepResult out;
    out.coupled = coupled;
    out.points.reserve(p_grid.size());
    for (std::size_t g = 0; g < p_grid.size(); ++g) {
        CrossingEstimate est{params, p_grid[g], level, domain, direction, trials, acc.hits[g],
                             0.0,    0.0,       0.0,   master_seed};
        est.p_hat = static_cast<double>(acc.hits[g]) / static_cast<double>(trials);
        const Interval ci = wilson_interval(acc.hits[g], trials);
        est.ci_low = ci.low;
        est.ci_high = ci.high;
        out.points.push_back(est);
    }
    return out;
}

// Bisection for the p where the estimated crossing probability passes
// `threshold`.  Each step runs an independent estimate (fresh seeds per step,
// no coupling across steps) and the full (p, p_hat) history is kept.
inline CriticalBracket find_critical(const GridParams& params, int level,
                                     std::int64_t trials_per_step, Direction direction,
                                     Layout domain, AdjacencyMode mode, double threshold,
                                     double tol, std::uint64_t master_seed, int threads = 0,
                                     std::int64_t cell_cap = kDefaultCellCap) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw std::domain_error("threshold must lie in (0,1)");
    if (!(tol > 0.0)) throw std::domain_error("tol must be positive");
    CriticalBracket bracket{params, direction, domain, level, threshold, 0.0, 1.0, trials_per_step,
                            {},     master_seed};
    std::uint64_t step = 0;
    const auto run = [&](double p) {
        const CrossingEstimate est =
            estimate_crossing(params, p, level, trials_per_step, direction, domain, mode,
                              derive_seed(master_seed, step++), threads, cell_cap);
        bracket.history.emplace_back(p, est.p_hat);
        return est.p_hat;
    };
    run(bracket.lo);
    run(bracket.hi);
    while (bracket.hi - bracket.lo > tol) {
        const double mid = 0.5 * (bracket.lo + bracket.hi);
        (run(mid) < threshold ? bracket.lo : bracket.hi) = mid;
    }
    return bracket;
}

// Estimate both crossing probabilities on the same realizations and report the
// paired difference p_hat_h - p_hat_v with its matched-pairs interval.
inline HvComparison compare_hv(const GridParams& params, double p, int level, std::int64_t trials,
                               std::uint64_t master_seed, int threads = 0,
                               AdjacencyMode mode = AdjacencyMode::edge_corner,
                               std::int64_t cell_cap = kDefaultCellCap) {
    if (trials < 1) throw std::domain_error("trials must be >= 1");
    detail::check_generation_inputs(params, p, level, cell_cap);
    const auto acc = detail::run_trials<detail::PairAcc>(
        trials, threads, [&](detail::PairAcc& a, std::int64_t i) {
            const Realization r =
                generate(params, p, level, derive_seed(master_seed, static_cast<std::uint64_t>(i)), 0,
                         cell_cap);
            const bool h = crossing(r, level, Direction::H, mode);
            const bool v = crossing(r, level, Direction::V, mode);
            if (h && v) ++a.counts.n11;
            else if (h) ++a.counts.n10;
            else if (v) ++a.counts.n01;
            else ++a.counts.n00;
        });
    HvComparison out{params, p, level, trials, acc.counts, 0.0, 0.0, 0.0, 0.0, 0.0, master_seed};
    const double nt = static_cast<double>(trials);
    out.p_hat_h = static_cast<double>(acc.counts.n11 + acc.counts.n10) / nt;
    out.p_hat_v = static_cast<double>(acc.counts.n11 + acc.counts.n01) / nt;
    out.diff = acc.counts.diff();
    const Interval ci = acc.counts.diff_interval();
    out.ci_low = ci.low;
    out.ci_high = ci.high;
    return out;
}

}  // namespace affperc
