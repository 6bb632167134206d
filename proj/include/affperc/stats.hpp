#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace affperc {

inline constexpr double kDefaultZ = 1.96;

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

// Wilson score interval for a binomial proportion.  Behaves sensibly at
// hits = 0 and hits = trials, unlike the Wald interval.
inline Interval wilson_interval(std::int64_t hits, std::int64_t trials, double z = kDefaultZ) {
    if (trials < 1) throw std::domain_error("wilson_interval needs trials >= 1");
    if (hits < 0 || hits > trials) throw std::domain_error("hits must lie in [0, trials]");
    const double nt = static_cast<double>(trials);
    const double phat = static_cast<double>(hits) / nt;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nt;
    const double center = (phat + z2 / (2.0 * nt)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / nt + z2 / (4.0 * nt * nt)) / denom;
    // The score interval contains phat mathematically; keep that exact under
    // rounding, and stay inside [0,1].
    return {std::max(0.0, std::min(center - half, phat)),
            std::min(1.0, std::max(center + half, phat))};
}

// Paired comparison of two indicators observed on the same trials, from the
// 2x2 contingency counts.  diff = P(first) - P(second) estimated as
// (n10 - n01)/N with the matched-pairs variance.
struct PairedCounts {
    std::int64_t n11 = 0;  // both events
    std::int64_t n10 = 0;  // first only
    std::int64_t n01 = 0;  // second only
    std::int64_t n00 = 0;  // neither

    std::int64_t trials() const { return n11 + n10 + n01 + n00; }

    double diff() const {
        return static_cast<double>(n10 - n01) / static_cast<double>(trials());
    }

    Interval diff_interval(double z = kDefaultZ) const {
        const double nt = static_cast<double>(trials());
        if (nt < 1.0) throw std::domain_error("paired interval needs at least one trial");
        const double d = diff();
        const double var = (static_cast<double>(n10 + n01) / nt - d * d) / nt;
        const double half = z * std::sqrt(var > 0.0 ? var : 0.0);
        return {d - half, d + half};
    }
};

}  // namespace affperc
