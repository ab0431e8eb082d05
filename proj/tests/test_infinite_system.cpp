#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "crw/infinite_system.hpp"
#include "crw/random.hpp"
#include "doctest.h"

using namespace crw;

namespace {

CorrelationSpec pattern(std::vector<Site> offsets) { return {std::move(offsets), false, std::nullopt}; }

DensityRun make_run(int L, ReactionMode mode, InitKind init, std::vector<double> times, std::uint64_t reps,
                    std::uint64_t seed) {
    DensityRun r;
    r.L = L;
    r.mode = mode;
    r.init = init;
    r.times = std::move(times);
    r.replicas = reps;
    r.seed = seed;
    r.threads = 1;
    return r;
}

DensitySeries synthetic(std::vector<double> times, std::vector<double> mean, ReactionMode mode, InitKind init,
                        int n) {
    DensitySeries d;
    d.series = EstimateSeries::exact(std::move(times), std::move(mean));
    d.mode = mode;
    d.init = init;
    d.n = n;
    return d;
}

}  // namespace

TEST_CASE("initial occupancy") {
    const auto full = init_field(4, ReactionMode::coalesce, InitKind::full, 1);
    CHECK(full.count() == 16);
    CHECK(full.density() == 1.0);
    CHECK(full.clock() == 0.0);

    const int L = 256, seeds = 20;
    double total = 0;
    for (int s = 0; s < seeds; ++s) {
        const auto f = init_field(L, ReactionMode::annihilate, InitKind::bernoulli_half, s);
        const double frac = f.density();
        CHECK(std::abs(frac - 0.5) <= 4.0 * std::sqrt(0.25 / (L * L)));
        total += frac;
    }
    CHECK(std::abs(total / seeds - 0.5) <= 3.0 * std::sqrt(0.25 / (double(L) * L * seeds)));

    CHECK(init_field(64, ReactionMode::coalesce, InitKind::bernoulli_half, 9) ==
          init_field(64, ReactionMode::coalesce, InitKind::bernoulli_half, 9));
    CHECK_FALSE(init_field(64, ReactionMode::coalesce, InitKind::bernoulli_half, 9) ==
                init_field(64, ReactionMode::coalesce, InitKind::bernoulli_half, 10));
}

TEST_CASE("invalid torus sizes are rejected") {
    for (int L : {0, 2, 6, 100, 65536})
        CHECK_THROWS_AS(OccupancyField(L, ReactionMode::coalesce), std::invalid_argument);
}

TEST_CASE("occupancy bookkeeping on a hand-built field") {
    OccupancyField f(8, ReactionMode::coalesce);
    f.place({0, 0});
    f.place({1, 0});
    f.place({7, 0});
    f.place({0, 7});
    CHECK(f.count() == 4);
    CHECK(f.occupied({-1, 0}));
    CHECK(f.occupied({8, 8}));
    CHECK_FALSE(f.occupied({2, 0}));
    CHECK(pattern_fraction(f, pattern({kOrigin})) == 4.0 / 64);
    // (7,0)-(0,0) and (0,0)-(1,0) wrap across the seam.
    CHECK(pattern_fraction(f, pattern({kOrigin, {1, 0}})) == 2.0 / 64);
    CHECK(pattern_fraction(f, pattern({kOrigin, {0, 1}})) == 1.0 / 64);
    CHECK(pattern_fraction(f, {{kOrigin, {1, 0}}, true, std::nullopt}) == 1.5 / 64);
    CHECK(pattern_fraction(f, {{kOrigin}, false, Site{1, 0}}) == 1.0);
    CHECK(pattern_fraction(f, {{kOrigin}, false, Site{2, 0}}) == 0.0);
}

TEST_CASE("empty field and backward evolution") {
    OccupancyField f(16, ReactionMode::annihilate);
    Rng rng(3);
    f.evolve(100.0, rng);
    CHECK(f.count() == 0);
    CHECK(f.clock() == 100.0);
    CHECK_THROWS_AS(f.evolve(50.0, rng), std::invalid_argument);
}

TEST_CASE("coalescence never empties the torus") {
    const auto f = evolve_field(init_field(4, ReactionMode::coalesce, InitKind::full, 2), 1e4, 5);
    CHECK(f.count() >= 1);
    CHECK(f.clock() == 1e4);
}

TEST_CASE("path-wise count monotonicity and annihilation parity") {
    Rng rng(17);
    auto c = init_field(64, ReactionMode::coalesce, InitKind::full, rng);
    auto a = init_field(64, ReactionMode::annihilate, InitKind::bernoulli_half, rng);
    const auto parity = a.count() % 2;
    std::size_t prev_c = c.count(), prev_a = a.count();
    for (int k = 1; k <= 4000; ++k) {
        const double t = 0.01 * k;
        c.evolve(t, rng);
        a.evolve(t, rng);
        CHECK(c.count() <= prev_c);
        CHECK(a.count() <= prev_a);
        CHECK(a.count() % 2 == parity);
        prev_c = c.count();
        prev_a = a.count();
    }
}

TEST_CASE("evolution is deterministic in the seed") {
    const auto f0 = init_field(128, ReactionMode::annihilate, InitKind::bernoulli_half, 4);
    CHECK(evolve_field(f0, 30.0, 8) == evolve_field(f0, 30.0, 8));
    CHECK_FALSE(evolve_field(f0, 30.0, 8) == evolve_field(f0, 30.0, 9));
}

TEST_CASE("density estimates: t = 0 values, positivity and monotonicity") {
    const auto run = make_run(128, ReactionMode::coalesce, InitKind::full, {0, 1, 10, 100}, 6, 21);
    const auto pats = estimate_patterns(run, {pattern({kOrigin}), pattern({kOrigin, {1, 0}})});
    CHECK(pats[0].series.mean[0] == 1.0);
    CHECK(pats[1].series.mean[0] == 1.0);
    CHECK(pats[0].series.warnings.empty());
    for (std::size_t i = 1; i < run.times.size(); ++i) {
        CHECK(pats[0].series.mean[i] > 0.0);
        CHECK(pats[0].series.mean[i] < pats[0].series.mean[i - 1]);
    }
    CHECK(pats[1].n == 2);
    const auto cols = pats[0].csv_columns();
    CHECK(series_csv(pats[0].series, cols).substr(0, 26) == "t,mean,stderr,n,L,mode,ini");
}

TEST_CASE("horizon and offset validation") {
    const auto small = estimate_rho1(make_run(64, ReactionMode::coalesce, InitKind::full, {100}, 2, 1));
    REQUIRE(small.series.warnings.size() == 1);
    CHECK(small.series.warnings[0].find("horizon") != std::string::npos);
    CHECK(horizon_ok(1024, 16384));
    CHECK_FALSE(horizon_ok(1023, 16384));
    const auto run = make_run(16, ReactionMode::coalesce, InitKind::full, {1}, 1, 1);
    CHECK_THROWS_AS(estimate_rhoN(run, pattern({kOrigin, {4, 0}})), std::invalid_argument);
    CHECK_THROWS_AS(estimate_rhoN(run, pattern({kOrigin, kOrigin})), std::invalid_argument);
    CHECK_THROWS_AS(estimate_rhoN(make_run(16, ReactionMode::coalesce, InitKind::full, {2, 1}, 1, 1),
                                  pattern({kOrigin})),
                    std::invalid_argument);
}

TEST_CASE("finite-size agreement between L = 1024 and L = 2048") {
    const auto a = estimate_rho1(make_run(1024, ReactionMode::coalesce, InitKind::full, {100}, 4, 40));
    const auto b = estimate_rho1(make_run(2048, ReactionMode::coalesce, InitKind::full, {100}, 4, 41));
    const double se = std::hypot(a.series.stderr_at(0), b.series.stderr_at(0));
    CHECK(std::abs(a.series.mean[0] - b.series.mean[0]) <= 3.0 * se);
}

TEST_CASE("translation invariance of single-site occupation") {
    const std::vector<double> grid{2, 10};
    auto run = make_run(64, ReactionMode::coalesce, InitKind::full, grid, 3000, 50);
    const auto origin = estimate_rhoN(run, {{kOrigin}, false, Site{0, 0}});
    run.seed = 51;
    const auto middle = estimate_rhoN(run, {{kOrigin}, false, Site{32, 32}});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double se = std::hypot(origin.series.stderr_at(i), middle.series.stderr_at(i));
        CHECK(std::abs(origin.series.mean[i] - middle.series.mean[i]) <= 3.0 * se);
    }
}

TEST_CASE("thinning between annihilating and coalescing systems") {
    const std::vector<double> grid{0, 10, 100};
    const auto pats = std::vector<CorrelationSpec>{pattern({kOrigin}), pattern({kOrigin, {1, 0}})};
    const auto coal = estimate_patterns(make_run(256, ReactionMode::coalesce, InitKind::full, grid, 32, 60), pats);
    const auto ann =
        estimate_patterns(make_run(256, ReactionMode::annihilate, InitKind::bernoulli_half, grid, 32, 61), pats);
    for (int k = 0; k < 2; ++k) {
        const auto report = thinning_report(coal[k], ann[k], k + 1);
        CHECK(report.pass());
        CHECK(report.rows.size() == grid.size());
    }
    CHECK(thinning_report(coal[0], ann[0], 1).rows[0].lhs == doctest::Approx(1.0).epsilon(0.01));
    const auto flagged = thinning_report(ann[0], coal[0], 1);
    CHECK_FALSE(flagged.pass());
    CHECK(flagged.flags.size() == 3);
}

TEST_CASE("negative correlation of adjacent sites") {
    const std::vector<double> grid{10, 100};
    const auto pats = estimate_patterns(make_run(256, ReactionMode::coalesce, InitKind::full, grid, 16, 70),
                                        {pattern({kOrigin}), pattern({kOrigin, {1, 0}})});
    const auto report = neg_corr_report(pats[0], pats[1], 2);
    CHECK(report.pass());
    CHECK(report.passes == 2);
    for (const auto& row : report.rows) CHECK(row.lhs < row.rhs);
}

TEST_CASE("report edge cases") {
    const std::vector<double> grid{1, 2};
    const auto r1 = synthetic(grid, {0.3, 0.2}, ReactionMode::coalesce, InitKind::full, 1);
    CHECK(neg_corr_report(r1, r1, 1).pass());
    const auto sq = synthetic(grid, {0.09, 0.04}, ReactionMode::coalesce, InitKind::full, 2);
    CHECK(neg_corr_report(r1, sq, 2).pass());
    const auto above = synthetic(grid, {0.1, 0.04}, ReactionMode::coalesce, InitKind::full, 2);
    const auto rep = neg_corr_report(r1, above, 2);
    CHECK(rep.failures == 1);
    CHECK_FALSE(rep.pass());
    const auto other = synthetic({1, 3}, {0.3, 0.2}, ReactionMode::coalesce, InitKind::full, 1);
    CHECK_THROWS_AS(neg_corr_report(r1, other, 1), std::invalid_argument);
    const auto ann = synthetic(grid, {0.15, 0.1}, ReactionMode::annihilate, InitKind::bernoulli_half, 1);
    CHECK(thinning_report(r1, ann, 1).pass());
}

TEST_CASE("crude density bracket and pair suppression trend") {
    const std::vector<double> grid{10, 30, 100, 300, 1000};
    const auto rho = estimate_rho1(make_run(512, ReactionMode::coalesce, InitKind::full, grid, 4, 80));
    double lo = 1e300, hi = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = rho.series.mean[i] * grid[i] / std::log(grid[i]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi / lo <= 10.0);

    // E[xi(0) xi(e1)] log t / rho1(t (1 - log^{-1/2} t))^2 stays within a factor 3.
    std::vector<double> times;
    const std::vector<double> targets{100, 400, 1600};
    for (double t : targets) {
        times.push_back(t * (1 - 1 / std::sqrt(std::log(t))));
        times.push_back(t);
    }
    const auto pats = estimate_patterns(make_run(1024, ReactionMode::coalesce, InitKind::full, times, 6, 81),
                                        {pattern({kOrigin}), pattern({kOrigin, {1, 0}})});
    std::vector<double> ratios;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const double back = pats[0].series.mean[2 * k];
        ratios.push_back(pats[1].series.mean[2 * k + 1] * std::log(targets[k]) / (back * back));
    }
    const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
    CHECK(*mn > 0.0);
    CHECK(*mx / *mn <= 3.0);
}
