#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "crw/finite_system.hpp"
#include "crw/lattice_walks.hpp"
#include "crw/oracles.hpp"
#include "crw/random.hpp"
#include "doctest.h"

using namespace crw;

namespace {

bool within_3se(const EstimateSeries& s, std::size_t i, double expected, double floor_se = 0.0) {
    return std::abs(s.mean[i] - expected) <= 3.0 * std::max(s.stderr_at(i), floor_se);
}

// Exact two-walker survival from (1,0), continuous time 2t, computed offline
// by the renewal generating-function inversion (first-passage decomposition of
// the discrete walk, Poisson mixing). Grid: 16 geometric points on [1e3, 1e5].
const std::vector<double> kFrozenTimes{
    1000.0, 1359.3563908785254, 1847.8497974222907, 2511.88643150958, 3414.5488738336007,
    4641.588833612777, 6309.57344480193, 8576.958985908946, 11659.144011798311,
    15848.93192461114, 21544.346900318822, 29286.445646252374, 39810.71705534969,
    54116.952654646375, 73564.22544596421, 100000.0};
const std::vector<double> kFrozenSurvival{
    0.30088624183235296, 0.29245509998763297, 0.28447376580422423, 0.2769080705403708,
    0.2697271098897836, 0.2629028808257635, 0.25640996246831665, 0.2502252356962453,
    0.24432763657679266, 0.23869793941158376, 0.23331856565242812, 0.22817341523375753,
    0.22324771770766313, 0.21852790035119207, 0.21400147141085274, 0.20965691630838207};

}  // namespace

TEST_CASE("single walker never collides") {
    const auto e = simulate_ensemble({{0, 0}}, 5.0, 42);
    CHECK(e.pair_collisions.empty());
    CHECK(e.clock == 5.0);
    const auto s = estimate_pnc_mc({{3, -2}}, {0, 1, 10, 100}, 50, 7, 1);
    for (double m : s.mean) CHECK(m == 1.0);
}

TEST_CASE("ensemble simulation is deterministic in the seed") {
    const std::vector<Site> starts{{0, 0}, {1, 0}, {0, 3}, {-2, 2}};
    const auto a = simulate_ensemble(starts, 500.0, 9);
    const auto b = simulate_ensemble(starts, 500.0, 9);
    CHECK(a == b);
    const auto c = simulate_ensemble(starts, 500.0, 10);
    CHECK_FALSE(a == c);
    for (const auto& [pair, when] : a.pair_collisions) {
        CHECK(pair.first < pair.second);
        CHECK(when <= a.clock);
    }
}

TEST_CASE("duplicate starts are rejected") {
    CHECK_THROWS_AS(simulate_ensemble({{1, 1}, {1, 1}}, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(estimate_pnc_mc({{0, 0}, {2, 0}, {0, 0}}, {1.0}, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(exact_pnc_pair({0, 0}, 1.0), std::invalid_argument);
}

TEST_CASE("pair collision frequency matches the killed-walk oracle") {
    const int runs = 4000;
    int survived = 0;
    for (int r = 0; r < runs; ++r)
        if (simulate_ensemble({{0, 0}, {1, 0}}, 1e4, replica_seed(2024, r)).pair_collisions.empty()) ++survived;
    const auto curve = oracle::renewal_survival({1, 0}, jump_truncation(2e4));
    const double p = oracle::poisson_mix(curve, 2e4);
    const double frac = static_cast<double>(survived) / runs;
    CHECK(std::abs(frac - p) <= 3.0 * std::sqrt(p * (1 - p) / runs));
}

TEST_CASE("non-collision estimates start at one and never increase within a replica") {
    const std::vector<double> grid{0, 1, 5, 20, 100, 400};
    for (std::uint64_t r = 0; r < 200; ++r) {
        const auto ind = pnc_replica({{0, 0}, {1, 0}, {1, 1}}, grid, replica_seed(5, r));
        CHECK(ind.front() == 1.0);
        CHECK(std::is_sorted(ind.rbegin(), ind.rend()));
    }
}

TEST_CASE("two-walker estimate agrees with the exact pair survival") {
    const auto grid = geometric_grid(1e2, 2048, 8);
    const auto mc = estimate_pnc_mc({{0, 0}, {1, 0}}, grid, 40000, 77, 1);
    const auto exact = exact_pnc_pair_series({1, 0}, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(exact[i] == doctest::Approx(exact_pnc_pair({1, 0}, grid[i])).epsilon(1e-12));
        CHECK(within_3se(mc, i, exact[i]));
    }
    const auto curve = oracle::renewal_survival({1, 0}, jump_truncation(2 * grid.back()));
    CHECK(exact.back() == doctest::Approx(oracle::poisson_mix(curve, grid.back(), 2.0)).epsilon(1e-9));
}

TEST_CASE("leading asymptotics overshoot the exact pair survival at t = 1e4") {
    const auto curve = oracle::renewal_survival({1, 0}, jump_truncation(2e4));
    const double exact = oracle::poisson_mix(curve, 1e4, 2.0);
    CHECK(exact == doctest::Approx(0.2472).epsilon(1e-3));
    CHECK(std::abs(exact - std::numbers::pi / std::log(2e4)) <= 0.08);
    const auto mc = estimate_pnc_mc({{0, 0}, {1, 0}}, {1e4}, 20000, 78, 1);
    CHECK(within_3se(mc, 0, exact));
}

TEST_CASE("exact pair survival conventions and monotonicity") {
    CHECK(exact_pnc_pair({1, 0}, 0.0) == 1.0);
    std::vector<double> grid;
    for (int k = 6; k <= 12; ++k) grid.push_back(std::ldexp(1.0, k));
    const auto v = exact_pnc_pair_series({1, 0}, grid);
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] < v[i - 1]);
    CHECK(exact_pnc_pair({1, 0}, kFrozenTimes.front()) == doctest::Approx(kFrozenSurvival.front()).epsilon(1e-9));
    CHECK(exact_pnc_pair({1, 0}, 1024.0) == doctest::Approx(0.30021806695210096).epsilon(1e-9));
    CHECK(exact_pnc_pair({0, 1}, 300.0) == exact_pnc_pair({-1, 0}, 300.0));
}

TEST_CASE("non-collision is invariant under translation, relabelling and lattice symmetry") {
    const std::vector<Site> base{{0, 0}, {2, 1}, {-1, 3}};
    const std::vector<double> grid{10, 100, 1000};
    const std::uint64_t reps = 6000;
    const auto ref = estimate_pnc_mc(base, grid, reps, 31, 1);

    std::vector<std::vector<Site>> variants;
    std::vector<Site> shifted;
    for (const auto& s : base) shifted.push_back(s + Site{17, -40});
    variants.push_back(shifted);
    variants.push_back({base[2], base[0], base[1]});
    for (int g : {1, 4, 7}) {
        std::vector<Site> img;
        for (const auto& s : base) img.push_back(apply_symmetry(g, s));
        variants.push_back(img);
    }
    for (const auto& v : variants) {
        const auto est = estimate_pnc_mc(v, grid, reps, 31, 1);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double se = std::hypot(ref.stderr_at(i), est.stderr_at(i));
            CHECK(std::abs(est.mean[i] - ref.mean[i]) <= 3.0 * se + 1e-12);
        }
    }
}

TEST_CASE("three walkers survive no better than their worst pair") {
    const std::vector<Site> starts{{0, 0}, {6, 0}, {0, 9}};
    const std::vector<double> grid{50, 500, 2000};
    const auto mc = estimate_pnc_mc(starts, grid, 8000, 13, 1);
    const auto p01 = exact_pnc_pair_series(starts[1] - starts[0], grid);
    const auto p02 = exact_pnc_pair_series(starts[2] - starts[0], grid);
    const auto p12 = exact_pnc_pair_series(starts[2] - starts[1], grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double bound = std::min({p01[i], p02[i], p12[i]});
        CHECK(mc.mean[i] <= bound + 3.0 * mc.stderr_at(i));
    }
}

TEST_CASE("simplified rate equation matches its closed form") {
    const double e = std::numbers::e;
    CHECK(pnc_ere_exact(2, e, 1.0, e * e) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(pnc_ere_exact(3, e, 1.0, e * e) == doctest::Approx(0.125).epsilon(1e-15));
    const auto two = pnc_ere_solve(2, e, 1.0, e * e, std::vector<double>{e, e * e});
    CHECK(std::abs(two.mean.back() / 0.5 - 1) <= 1e-8);
    const auto three = pnc_ere_solve(3, e, 1.0, e * e, std::vector<double>{e, e * e});
    CHECK(std::abs(three.mean.back() / 0.125 - 1) <= 1e-8);

    for (int n : {1, 2, 3, 4}) {
        const double t0 = 10.0, p0 = 0.7;
        const auto s = pnc_ere_solve(n, t0, p0, 1e6 * t0);
        REQUIRE(s.times.front() == t0);
        REQUIRE(s.times.back() == doctest::Approx(1e6 * t0));
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double exact = pnc_ere_exact(n, t0, p0, s.times[i]);
            CHECK(std::abs(s.mean[i] / exact - 1) <= 1e-8);
            if (n == 1) CHECK(s.mean[i] == p0);
        }
    }
    CHECK_THROWS_AS(pnc_ere_solve(2, 1.0, 1.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(pnc_ere_solve(2, 3.0, 0.0, 10.0), std::invalid_argument);
}

TEST_CASE("log-power fit recovers exact inputs") {
    const auto grid = geometric_grid(1e3, 1e5, 16);
    std::vector<double> synth, flat(grid.size(), 0.4);
    for (double t : grid) synth.push_back(7.0 * std::pow(std::log(t), -3.0));
    const auto fit = fit_log_power(EstimateSeries::exact(grid, synth), 3);
    CHECK(std::abs(fit.exponent + 3) <= 1e-6);
    CHECK(std::abs(fit.constant - std::log(7.0)) <= 1e-6);
    CHECK(fit.residual_rms <= 1e-9);
    CHECK(fit.expected_exponent == -3.0);
    CHECK(fit.t_min == doctest::Approx(1e3));
    CHECK(fit.t_max == doctest::Approx(1e5));

    const auto zero = fit_log_power(EstimateSeries::exact(grid, flat), 2);
    CHECK(std::abs(zero.exponent) <= 1e-12);

    std::vector<double> bad = synth;
    bad[10] = 0.0;
    CHECK_THROWS_AS(fit_log_power(EstimateSeries::exact(grid, bad), 3), std::invalid_argument);
}

TEST_CASE("log-power fit on the exact pair survival") {
    const auto fit = fit_log_power(EstimateSeries::exact(kFrozenTimes, kFrozenSurvival), 2);
    CHECK(fit.exponent >= -1.6);
    CHECK(fit.exponent <= -0.6);
}
