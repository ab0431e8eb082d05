#include "crw/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "crw/experiment.hpp"
#include "crw/finite_system.hpp"
#include "crw/infinite_system.hpp"
#include "crw/lattice_walks.hpp"
#include "crw/oned_exact.hpp"
#include "crw/oracles.hpp"
#include "crw/rate_equations.hpp"

namespace crw {

VerifyLevel parse_verify_level(const std::string& s) {
    if (s == "fast") return VerifyLevel::fast;
    if (s == "full") return VerifyLevel::full;
    throw std::invalid_argument("unknown verify level '" + s + "' (expected fast|full)");
}

std::string to_string(VerifyLevel l) { return l == VerifyLevel::fast ? "fast" : "full"; }

bool VerifyReport::pass() const {
    return std::none_of(results.begin(), results.end(), [](const auto& r) { return r.status == Status::fail; });
}

std::string format_result(const CriterionResult& r) {
    const char* word = r.status == Status::pass ? "PASS" : r.status == Status::fail ? "FAIL" : "SKIP";
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.1f", r.seconds);
    return "criterion " + std::to_string(r.id) + " " + word + " " + r.title + ": " + r.detail + " (" + secs + " s)";
}

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

CriterionResult outcome(bool ok, std::string detail) {
    CriterionResult r;
    r.status = ok ? Status::pass : Status::fail;
    r.detail = std::move(detail);
    return r;
}

DensityRun density_run(int L, ReactionMode mode, InitKind init, std::vector<double> times, std::uint64_t reps,
                       std::uint64_t seed) {
    DensityRun r;
    r.L = L;
    r.mode = mode;
    r.init = init;
    r.times = std::move(times);
    r.replicas = reps;
    r.seed = seed;
    return r;
}

const CorrelationSpec kSingle{{kOrigin}, false, std::nullopt};
const CorrelationSpec kAdjacent{{kOrigin, kE1}, false, std::nullopt};

DensitySeries rows(const DensitySeries& d, const std::vector<std::size_t>& idx) {
    DensitySeries out = d;
    EstimateSeries s;
    for (auto i : idx) {
        s.times.push_back(d.series.times[i]);
        s.mean.push_back(d.series.mean[i]);
        s.var_accum.push_back(d.series.var_accum[i]);
        s.n.push_back(d.series.n[i]);
    }
    s.warnings = d.series.warnings;
    out.series = std::move(s);
    return out;
}

struct Suite {
    VerifyLevel level;
    bool full() const { return level == VerifyLevel::full; }

    // Criteria 4 and 5 share one coalescing run.
    std::optional<std::vector<DensitySeries>> shared;
    const std::vector<DensitySeries>& coalescing_run() {
        if (!shared) {
            const int L = full() ? 1024 : 512;
            const std::uint64_t reps = full() ? 16 : 8;
            shared = estimate_patterns(
                density_run(L, ReactionMode::coalesce, InitKind::full, {10, 100, 250, 1000}, reps, 4004),
                {kSingle, kAdjacent});
        }
        return *shared;
    }

    CriterionResult c1() {
        const auto start = std::chrono::steady_clock::now();
        const double v = exact_pnc_pair({1, 0}, 4096.0);
        const double secs = seconds_since(start);
        const double dev = std::abs(v * std::log(8192.0) / kPi - 1.0);
        auto r = outcome(dev <= 0.25 && secs <= 180.0,
                         fmt("P[tau_12 > 4096] = %.8f, |P log(8192)/pi - 1| = %.4f <= 0.25, runtime %.0f s <= 180",
                             v, dev, secs));
        r.title = "two-walker non-collision vs pi/log(2t)";
        return r;
    }

    CriterionResult c2() {
        const double t_hi = full() ? 1e4 : 2048.0;
        const std::uint64_t reps = full() ? 1000000 : 100000;
        const auto grid = geometric_grid(1e2, t_hi, 8);
        const auto start = std::chrono::steady_clock::now();
        const auto mc = estimate_pnc_mc({{0, 0}, {1, 0}}, grid, reps, 2002, 0);
        const auto exact = exact_pnc_pair_series({1, 0}, grid);
        double worst = 0.0;
        int ok = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double z = std::abs(mc.mean[i] - exact[i]) / mc.stderr_at(i);
            worst = std::max(worst, z);
            ok += z <= 3.0;
        }
        const double secs = seconds_since(start);
        auto r = outcome(ok == static_cast<int>(grid.size()) && secs <= 600.0,
                         fmt("%d/%zu grid times in [1e2, %g] within 3 stderr, max |mc - exact|/stderr = %.2f "
                             "(%llu replicas), runtime %.0f s <= 600",
                             ok, grid.size(), t_hi, worst, static_cast<unsigned long long>(reps), secs));
        r.title = "two-walker Monte Carlo vs exact pair survival";
        return r;
    }

    CriterionResult c3() {
        const int L = full() ? 1024 : 256;
        const std::vector<double> times{10, 100, 1000};
        const auto coal = estimate_rho1(density_run(L, ReactionMode::coalesce, InitKind::full, times, 32, 3003));
        const auto ann =
            estimate_rho1(density_run(L, ReactionMode::annihilate, InitKind::bernoulli_half, times, 32, 3004));
        const auto report = thinning_report(coal, ann, 1);
        std::string d = fmt("L=%d, 32 replicas per mode;", L);
        for (const auto& row : report.rows)
            d += fmt(" t=%g: |2 rho_a - rho_c| = %.3g vs 3 se = %.3g;", row.t, std::abs(row.lhs - row.rhs), row.slack);
        for (const auto& f : report.flags) d += " flag: " + f + ";";
        auto r = outcome(report.pass(), d);
        r.title = "thinning 2 rho_1^a = rho_1";
        return r;
    }

    CriterionResult c4() {
        const auto& rho = coalescing_run()[0].series;
        auto ratio = [&](std::size_t i) { return rho.mean[i] * kPi * rho.times[i] / std::log(rho.times[i]); };
        const double r250 = ratio(2), r1000 = ratio(3);
        const double change = std::abs(r250 / r1000 - 1.0);
        const bool ok = r1000 >= 0.6 && r1000 <= 1.6 && r250 > r1000 && change < 0.4;
        auto r = outcome(ok, fmt("L=%d: rho pi t/log t = %.4f at t=1000 (band [0.6, 1.6]), %.4f at t=250 "
                                 "(larger: %s), relative difference %.3f < 0.4",
                                 coalescing_run()[0].L, r1000, r250, r250 > r1000 ? "yes" : "no", change));
        r.title = "coalescing density band rho_1 pi t / log t";
        return r;
    }

    CriterionResult c5() {
        const auto& run = coalescing_run();
        const auto report = neg_corr_report(rows(run[0], {0, 1, 3}), rows(run[1], {0, 1, 3}), 2);
        std::string d = fmt("L=%d;", run[0].L);
        for (const auto& row : report.rows)
            d += fmt(" t=%g: rho_2 = %.4g <= rho_1^2 = %.4g + %.2g;", row.t, row.lhs, row.rhs, row.slack);
        auto r = outcome(report.pass(), d);
        r.title = "negative correlation rho_2 <= rho_1^2";
        return r;
    }

    CriterionResult c6() {
        CriterionResult r;
        r.title = "adjacent-pair suppression E[xi(0) xi(e1)] / rho_1^2";
        if (!full()) {
            r.status = Status::skip;
            r.detail = "needs the L=2048 run of the full level";
            return r;
        }
        const auto pats = estimate_patterns(
            density_run(2048, ReactionMode::coalesce, InitKind::full, {100, 1600}, 16, 6006), {kSingle, kAdjacent});
        auto q = [&](std::size_t i) {
            const double m = pats[0].series.mean[i];
            return pats[1].series.mean[i] / (m * m);
        };
        auto q_se = [&](std::size_t i) {
            const double m = pats[0].series.mean[i];
            return pats[1].series.stderr_at(i) / (m * m);
        };
        const double q100 = q(0), q1600 = q(1);
        const double drop = 1.0 - q1600 / q100;
        r = outcome(drop >= 0.25,
                    fmt("L=2048, 16 replicas: ratio %.4f +- %.4f at t=100, %.4f +- %.4f at t=1600: decrease %.1f%% "
                        ">= 25%%",
                        q100, q_se(0), q1600, q_se(1), 100.0 * drop));
        r.title = "adjacent-pair suppression E[xi(0) xi(e1)] / rho_1^2";
        return r;
    }

    CriterionResult c7() {
        // (a) two motions
        double worst_a = 0.0;
        for (double gap : {0.05, 0.5, 1.0, 2.0, 7.0})
            for (double t : {0.01, 0.3, 1.0, 10.0, 1e4}) {
                const double pf = pnc_pfaffian_1d(OrderedStarts1D({0.0, gap}), t);
                worst_a = std::max(worst_a, std::abs(pf - phi(gap / std::sqrt(4.0 * t))));
            }
        // (b) ordered integral of the Karlin-McGregor density
        double worst_b = 0.0;
        for (const auto& xs : {std::vector<double>{0.0, 2.0}, std::vector<double>{0.0, 1.0, 2.0, 3.0},
                               std::vector<double>{-1.0, 0.5, 0.9, 2.0}})
            worst_b = std::max(worst_b, std::abs(oracle::ordered_km_integral(xs, 1.0) -
                                                 pnc_pfaffian_1d(OrderedStarts1D(xs), 1.0)));
        // (c) Pf^2 = det
        std::mt19937_64 gen(7007);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double worst_c = 0.0;
        for (int n : {2, 4, 6, 8})
            for (int rep = 0; rep < 50; ++rep) {
                SkewMatrix m(n);
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j) m.set(i, j, u(gen));
                const double pf = pfaffian(m), det = oracle::eigen_determinant(m.entries(), n);
                worst_c = std::max(worst_c, std::abs(pf * pf - det) / std::abs(det));
            }
        // (d) Brownian quadruples
        const std::vector<double> starts{0.0, 1.0, 2.0, 3.0};
        const std::uint64_t paths = full() ? 1000000 : 100000;
        const auto mc = oracle::brownian_pnc_mc(starts, 1.0, paths, 400, 7008, 0);
        const double exact = pnc_pfaffian_1d(OrderedStarts1D(starts), 1.0);
        const double z = std::abs(mc.mean[0] - exact) / mc.stderr_at(0);

        const bool ok = worst_a <= 1e-12 && worst_b <= 1e-4 && worst_c <= 1e-9 && z <= 3.0;
        auto r = outcome(ok, fmt("(a) max |Pf - phi| = %.2g <= 1e-12; (b) max |int KM - Pf| = %.2g <= 1e-4; "
                                 "(c) max |Pf^2 - det|/|det| = %.2g <= 1e-9; (d) starts (0,1,2,3), t=1: Pf = %.6f, "
                                 "MC = %.6f +- %.1g (%llu paths), %.2f stderr <= 3",
                                 worst_a, worst_b, worst_c, exact, mc.mean[0], mc.stderr_at(0),
                                 static_cast<unsigned long long>(paths), z));
        r.title = "one-dimensional Pfaffian formula";
        return r;
    }

    CriterionResult c8() {
        double worst_pnc = 0.0;
        for (int n : {2, 3, 4}) {
            const auto s = pnc_ere_solve(n, 10.0, 1.0, 1e7);
            for (std::size_t i = 0; i < s.size(); ++i)
                worst_pnc = std::max(worst_pnc, std::abs(s.mean[i] / pnc_ere_exact(n, 10.0, 1.0, s.times[i]) - 1.0));
        }
        OdeSpec ere{10.0, 0.1, RhsKind::rho1_ere, 2, 1.0, 200.0};
        const double exact = oracle::rho1_ere_exact(10.0, 0.1, 200.0);
        std::vector<double> errs;
        for (double h : {8.0, 4.0, 2.0}) {
            SolverOptions o;
            o.fixed_step = h;
            errs.push_back(std::abs(rho1_ere_solve(ere, std::vector<double>{10.0, 200.0}, o).mean.back() / exact - 1));
        }
        const double ratio = std::min(errs[0] / errs[1], errs[1] / errs[2]);
        OdeSpec mf{1.0, 1.0, RhsKind::rho1_mean_field, 2, 1.0, 1e6};
        const auto s = solve_ode(mf);
        double worst_mf = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
            worst_mf = std::max(worst_mf, std::abs(s.mean[i] * (1.0 + kPi * (s.times[i] - 1.0)) - 1.0));
        const bool ok = worst_pnc <= 1e-8 && ratio >= 8.0 && worst_mf <= 1e-8;
        auto r = outcome(ok, fmt("non-collision equation N=2,3,4 max rel err %.2g <= 1e-8; density equation "
                                 "error ratio under step halving %.1f >= 8; log-free closed form max rel err %.2g "
                                 "<= 1e-8",
                                 worst_pnc, ratio, worst_mf));
        r.title = "rate-equation closed forms and integrator order";
        return r;
    }

    CriterionResult c9() {
        auto sup_err = [](double t) {
            const auto table = build_transition_table(t, default_radius(t));
            double worst = 0.0;
            for (int y = -table.radius; y <= table.radius; ++y)
                for (int x = -table.radius; x <= table.radius; ++x)
                    worst = std::max(worst, std::abs(table.at({x, y}) - transition_lclt(t, {x, y})));
            return worst;
        };
        const double e64 = sup_err(64), e256 = sup_err(256), e1024 = sup_err(1024);
        const double r1 = e256 / e64, r2 = e1024 / e64;
        const bool ok = r1 <= 2.0 / 4.0 && r2 <= 2.0 / 16.0;
        auto r = outcome(ok, fmt("sup error %.3g, %.3g, %.3g at t=64, 256, 1024; ratios %.4f <= 1/2 and %.4f <= 1/8",
                                 e64, e256, e1024, r1, r2));
        r.title = "local CLT error decay";
        return r;
    }

    CriterionResult c10() {
        namespace fs = std::filesystem;
        const fs::path root = fs::temp_directory_path() / "crw_verify_determinism";
        fs::remove_all(root);
        std::vector<ExperimentConfig> configs;
        {
            ExperimentConfig c;
            c.command = Command::pnc;
            c.starts = {{0, 0}, {1, 0}, {2, 2}};
            c.t_grid = {10, 1000, 6};
            c.replicas = 3000;
            c.master_seed = 11;
            configs.push_back(c);
        }
        {
            ExperimentConfig c;
            c.command = Command::density;
            c.L = 128;
            c.t_grid = {1, 50, 5};
            c.replicas = 300;
            c.master_seed = 12;
            configs.push_back(c);
            c.command = Command::rhoN;
            c.offsets = {{0, 0}, {1, 0}};
            c.mode = ReactionMode::annihilate;
            c.init = InitKind::bernoulli_half;
            c.master_seed = 13;
            configs.push_back(c);
        }
        {
            ExperimentConfig c;
            c.command = Command::oned;
            c.starts_1d = {0, 1, 2, 3};
            c.t_grid = {0.1, 1e4, 12};
            configs.push_back(c);
            c.command = Command::ode;
            c.rhs_kind = RhsKind::rho1_ere;
            c.t_grid = {10, 1e6, 12};
            c.y0 = 0.07;
            configs.push_back(c);
        }
        auto slurp = [](const fs::path& p) {
            std::ifstream in(p, std::ios::binary);
            std::ostringstream os;
            os << in.rdbuf();
            return os.str();
        };
        int identical = 0;
        std::string d;
        for (const auto& base : configs) {
            std::vector<std::string> texts;
            int k = 0;
            for (unsigned threads : {1u, 1u, 4u}) {
                auto c = base;
                c.threads = threads;
                c.output_path = (root / (to_string(c.command) + std::to_string(k++))).string();
                const auto m = run_experiment(c);
                std::string all;
                for (const auto& f : m.outputs) all += slurp(fs::path(c.output_path) / f);
                texts.push_back(all);
            }
            const bool same = !texts[0].empty() && texts[0] == texts[1] && texts[0] == texts[2];
            identical += same;
            d += " " + to_string(base.command) + (same ? " identical;" : " DIFFERS;");
        }
        fs::remove_all(root);
        auto r = outcome(identical == static_cast<int>(configs.size()),
                         "two runs and 1 vs 4 threads, byte comparison of CSV:" + d);
        r.title = "deterministic output";
        return r;
    }
};

}  // namespace

VerifyReport verify_suite(VerifyLevel level, std::ostream* progress, const std::vector<int>& only) {
    Suite suite{level, std::nullopt};
    using Fn = CriterionResult (Suite::*)();
    const Fn fns[kCriterionCount] = {&Suite::c1, &Suite::c2, &Suite::c3, &Suite::c4, &Suite::c5,
                                     &Suite::c6, &Suite::c7, &Suite::c8, &Suite::c9, &Suite::c10};
    VerifyReport report;
    report.level = level;
    for (int id = 1; id <= kCriterionCount; ++id) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = (suite.*fns[id - 1])();
        } catch (const std::exception& e) {
            r.status = Status::fail;
            r.detail = std::string("error: ") + e.what();
        }
        r.id = id;
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (progress) *progress << format_result(r) << std::endl;
        report.results.push_back(std::move(r));
    }
    return report;
}

}  // namespace crw
