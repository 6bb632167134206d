#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "affperc/analytic.hpp"
#include "support/oracles.hpp"

using namespace affperc;

TEST_CASE("extinction is certain at or below 1/(mn)") {
    for (double p : {0.0, 0.05, 0.12, 0.16}) {
        const ExtinctionResult r = extinction_prob(2, 3, p);
        CHECK(std::abs(r.t - 1.0) < 1e-9);
        CHECK(r.converged);
    }
    // Exactly at the threshold convergence is sublinear; the cap flags it.
    const ExtinctionResult crit = extinction_prob(2, 3, 1.0 / 6.0);
    CHECK_FALSE(crit.converged);
    CHECK(crit.t > 0.9999);
    CHECK(crit.survival < 0.02);
}

TEST_CASE("p=1 never goes extinct") {
    const ExtinctionResult r = extinction_prob(2, 3, 1.0);
    CHECK(r.t == 0.0);
    CHECK(r.survival == 1.0);
}

TEST_CASE("extinction fixed point at (2,3), p=0.3") {
    const ExtinctionResult r = extinction_prob(2, 3, 0.3);
    CHECK(std::abs(r.t - 0.186716193449) < 1e-9);  // independent iteration at 1e-15 tolerance
}

TEST_CASE("extinction satisfies its own equation and is monotone in p") {
    double prev_t = 1.0;
    for (int i = 0; i <= 40; ++i) {
        const double p = i / 40.0;
        const ExtinctionResult r = extinction_prob(2, 3, p);
        if (r.converged) CHECK(std::abs(r.t - std::pow(p * r.t + 1.0 - p, 6.0)) < 1e-10);
        CHECK(r.t <= prev_t + 1e-9);
        prev_t = r.t;
    }
    CHECK_THROWS_AS(extinction_prob(2, 3, 1.0001), std::domain_error);
    CHECK_THROWS_AS(extinction_prob(3, 3, 0.5), std::domain_error);
}

TEST_CASE("dimension formulas") {
    CHECK(dimensions(2, 3, 1.0).dim_hb == Catch::Approx(2.0).margin(1e-12));
    CHECK(dimensions(2, 3, 1.0).dim_assouad == 2.0);
    // Continuity at the branch point p = 1/m: both formulas give 1.
    const double at_break = dimensions(2, 3, 1.0 / 3.0).dim_hb;
    CHECK(std::abs(at_break - 1.0) < 1e-12);
    // (2,3), p=0.25 sits in the lower branch; the upper branch would be larger.
    const double d = dimensions(2, 3, 0.25).dim_hb;
    CHECK(d == Catch::Approx(std::log(1.5) / std::log(2.0)).margin(1e-12));
    CHECK(d < std::log(0.25 * 9.0) / std::log(3.0));
    CHECK_THROWS_AS(dimensions(2, 3, 1.0 / 6.0), std::domain_error);
    CHECK_THROWS_AS(dimensions(2, 3, 0.1), std::domain_error);
}

TEST_CASE("dimension is non-decreasing in p") {
    double prev = 0.0;
    for (int i = 1; i <= 50; ++i) {
        const double p = std::min(1.0, 1.0 / 6.0 + (1.0 - 1.0 / 6.0) * i / 50.0);
        const double d = dimensions(2, 3, p).dim_hb;
        CHECK(d >= prev - 1e-12);
        CHECK(d <= 2.0);
        prev = d;
    }
}

TEST_CASE("jfull map endpoints and binomial identity") {
    CHECK(jfull_map(3, 4, 0.9, 0.0) == 0.0);
    CHECK(jfull_map(3, 4, 1.0, 1.0) == Catch::Approx(1.0).margin(1e-12));
    // f_p(t) = P(Bin(mn, p t) >= mn - 1)
    const double lhs = jfull_map(3, 4, 0.9, 0.8);
    const double rhs = oracle::binomial_tail_ge(11, 12, 0.9 * 0.8);
    CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
    CHECK_THROWS_AS(jfull_map(3, 4, 0.9, 1.2), std::domain_error);
}

TEST_CASE("jfull limit at p=1 is 1 and small p collapse to 0") {
    const JfullResult one = jfull_limit(3, 4, 1.0);
    CHECK(one.limit == Catch::Approx(1.0).margin(1e-12));
    const JfullResult half = jfull_limit(3, 4, 0.5);
    CHECK(half.limit < 1e-12);
    // f_p stays strictly below the diagonal on (0,1] at p=0.5.
    for (int i = 1; i <= 1000; ++i) {
        const double t = i / 1000.0;
        CHECK(jfull_map(3, 4, 0.5, t) < t);
    }
}

TEST_CASE("jfull iterates are monotone non-increasing") {
    // Up to rounding noise of the powers once the iterates sit on the fixed point.
    for (double p : {0.9, 0.99, 0.999}) {
        double t = 1.0;
        for (int j = 0; j < 200; ++j) {
            const double next = jfull_map(3, 4, p, t);
            REQUIRE(next <= t + 1e-12);
            REQUIRE(next >= 0.0);
            t = next;
        }
    }
}

TEST_CASE("jfull quantities are refused for n=2") {
    CHECK_THROWS_AS(jfull_limit(2, 3, 0.9), std::domain_error);
    CHECK_THROWS_AS(crossing_upper_bound(2, 3, 1e-3), std::domain_error);
}

TEST_CASE("crossing upper bound satisfies the bisection contract") {
    const double tol = 1e-3;
    const double p_a = crossing_upper_bound(3, 4, tol);
    CHECK(p_a < 1.0);
    CHECK(p_a > 0.0);
    const JfullResult at = jfull_limit(3, 4, p_a);
    CHECK(at.converged);
    CHECK(at.limit > kJfullPositiveEps);
    const JfullResult below = jfull_limit(3, 4, p_a - 2.0 * tol);
    CHECK(below.limit < 1e-12);
}

TEST_CASE("just above the threshold the fixed point is stable") {
    const double p = crossing_upper_bound(3, 4, 1e-4) + 1e-3;
    const JfullResult r = jfull_limit(3, 4, p);
    REQUIRE(r.limit > 0.0);
    // Stability: |f_p'| < 1 at the limit, both in closed form and numerically.
    const int mn = 12;
    const double closed =
        mn * (mn - 1) * std::pow(p, mn - 1) * std::pow(r.limit, mn - 2) * (1.0 - p * r.limit);
    const double h = 1e-7;
    const double numeric =
        (jfull_map(3, 4, p, r.limit + h) - jfull_map(3, 4, p, r.limit - h)) / (2.0 * h);
    CHECK(closed == Catch::Approx(numeric).margin(1e-4));
    CHECK(std::abs(closed) < 1.0);
}

TEST_CASE("full row probability: exact value and limits") {
    CHECK(full_row_prob(2, 3, 1.0, 5, 2) == 1.0);
    CHECK(full_row_prob(2, 3, 0.0, 5, 2) == 0.0);
    // 1 - (1 - 0.5^2)^3
    CHECK(full_row_prob(2, 3, 0.5, 1, 0) == Catch::Approx(0.578125).margin(1e-12));
    CHECK_THROWS_AS(full_row_prob(2, 3, 0.5, 1, 2), std::domain_error);
}

TEST_CASE("full row probability decays to zero in q and survives underflow") {
    // The sequence is not monotone from the start for every p (at p=0.9 it
    // climbs for a few levels before the row-length exponent wins), but it
    // always dies off eventually; the p=0.5 case decreases from q=1 on.
    double prev = 1.0;
    for (int q = 1; q <= 8; ++q) {
        const double v = full_row_prob(2, 3, 0.5, q, 0);
        REQUIRE(v < prev);
        prev = v;
    }
    for (double p : {0.3, 0.5, 0.9, 0.99}) {
        for (int q = 0; q <= 14; ++q) {
            const double v = full_row_prob(2, 3, p, q, 0);
            REQUIRE(v >= 0.0);
            REQUIRE(v <= 1.0);
        }
        CHECK(full_row_prob(2, 3, p, 14, 0) < 1e-12);
    }
    // Deep in the log-space branch the value is positive and finite.
    const double tiny = full_row_prob(2, 3, 0.5, 12, 0);
    CHECK(tiny >= 0.0);
    CHECK(tiny < 1e-100);
}

TEST_CASE("tau lower bounds") {
    const TauBounds b = tau_lower_bound(2, 3);
    CHECK(b.h_bound == Catch::Approx(1.0 / 144.0).margin(1e-15));
    CHECK(b.v_bound == Catch::Approx(std::pow(8.0, -1.5)).margin(1e-15));
    for (int m = 3; m <= 8; ++m) {
        const TauBounds t = tau_lower_bound(2, m);
        CHECK(t.h_bound > 0.0);
        CHECK(t.h_bound < 1.0);
        CHECK(t.v_bound > 0.0);
        CHECK(t.v_bound < 1.0);
    }
    CHECK(tau_lower_bound(2, 4).h_bound < tau_lower_bound(2, 3).h_bound);
}

TEST_CASE("exact level-1 crossing endpoints") {
    CHECK(exact_level1_crossing(2, 3, 1.0, Direction::H) == Catch::Approx(1.0).margin(1e-12));
    CHECK(exact_level1_crossing(2, 3, 0.0, Direction::H) == 0.0);
    CHECK_THROWS_AS(exact_level1_crossing(5, 6, 0.5, Direction::H), std::domain_error);
}

TEST_CASE("exact level-1 crossing matches the 2x2 hand enumeration") {
    // Corner adjacency: 4 two-cell subsets cross (both same-row pairs and both
    // diagonals), all 4 three-cell subsets, and the full grid:
    //   P(p) = 4 p^2 (1-p)^2 + 4 p^3 (1-p) + p^4.
    // Edge adjacency loses the two diagonals.
    for (double p : {0.2, 0.3, 0.5, 0.8}) {
        const double hand_corner = 4 * std::pow(p, 2) * std::pow(1 - p, 2) +
                                   4 * std::pow(p, 3) * (1 - p) + std::pow(p, 4);
        const double hand_edge = 2 * std::pow(p, 2) * std::pow(1 - p, 2) +
                                 4 * std::pow(p, 3) * (1 - p) + std::pow(p, 4);
        CHECK(exact_level1_crossing(2, 2, p, Direction::H, AdjacencyMode::edge_corner) ==
              Catch::Approx(hand_corner).margin(1e-12));
        CHECK(exact_level1_crossing(2, 2, p, Direction::H, AdjacencyMode::edge) ==
              Catch::Approx(hand_edge).margin(1e-12));
    }
}

TEST_CASE("exact level-1 crossing frozen values for (2,3)") {
    // Independent subset enumeration with BFS connectivity, frozen:
    CHECK(exact_level1_crossing(2, 3, 0.3, Direction::H) == Catch::Approx(0.388431).margin(1e-9));
    CHECK(exact_level1_crossing(2, 3, 0.6, Direction::H) == Catch::Approx(0.857664).margin(1e-9));
    CHECK(exact_level1_crossing(2, 3, 0.9, Direction::H) == Catch::Approx(0.997839).margin(1e-9));
    CHECK(exact_level1_crossing(2, 3, 0.3, Direction::V) == Catch::Approx(0.132651).margin(1e-9));
    CHECK(exact_level1_crossing(2, 3, 0.6, Direction::V) == Catch::Approx(0.592704).margin(1e-9));
    CHECK(exact_level1_crossing(2, 3, 0.9, Direction::V) == Catch::Approx(0.970299).margin(1e-9));
}

TEST_CASE("analytic report assembles the pieces") {
    const AnalyticReport r23 = analytic_report(2, 3, 0.3);
    CHECK(r23.survival == Catch::Approx(1.0 - 0.186716193449).margin(1e-9));
    CHECK(r23.dim_hb.has_value());
    CHECK_FALSE(r23.jfull_limit.has_value());
    CHECK_FALSE(r23.p_A.has_value());
    CHECK(r23.tau_h_bound == Catch::Approx(1.0 / 144.0).margin(1e-15));

    const AnalyticReport r34 = analytic_report(3, 4, 0.999);
    REQUIRE(r34.jfull_limit.has_value());
    CHECK(*r34.jfull_limit > 0.0);
    REQUIRE(r34.p_A.has_value());
    CHECK(*r34.p_A < 1.0);

    const AnalyticReport dead = analytic_report(2, 3, 0.05);
    CHECK_FALSE(dead.dim_hb.has_value());
    CHECK(dead.survival == Catch::Approx(0.0).margin(1e-9));
}
