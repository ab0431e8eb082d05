#include "crw/finite_system.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "crw/lattice_walks.hpp"
#include "crw/parallel.hpp"
#include "crw/random.hpp"
#include "crw/rate_equations.hpp"

namespace crw {

void require_distinct(const std::vector<Site>& starts) {
    std::set<Site> seen(starts.begin(), starts.end());
    if (seen.size() != starts.size()) throw std::invalid_argument("walker starts must be pairwise distinct");
}

WalkerEnsemble simulate_ensemble(const std::vector<Site>& starts, double t_max, std::uint64_t seed) {
    require_distinct(starts);
    if (!(t_max >= 0.0)) throw std::invalid_argument("simulate_ensemble: t_max must be >= 0");
    WalkerEnsemble ens;
    ens.starts = starts;
    ens.positions = starts;
    const auto n = static_cast<std::uint32_t>(starts.size());
    if (n == 0) {
        ens.clock = t_max;
        return ens;
    }
    Rng rng(seed);
    double clock = 0.0;
    for (;;) {
        clock += rng.exponential(static_cast<double>(n));
        if (clock > t_max) break;
        const std::uint64_t bits = rng();
        const auto i = static_cast<int>(((bits >> 32) * n) >> 32);
        auto& p = ens.positions[i];
        p = p + kSteps[bits & 3];
        for (int j = 0; j < static_cast<int>(n); ++j) {
            if (j == i || ens.positions[j] != p) continue;
            ens.pair_collisions.try_emplace({std::min(i, j), std::max(i, j)}, clock);
        }
    }
    ens.clock = t_max;
    return ens;
}

std::vector<double> pnc_replica(const std::vector<Site>& starts, const std::vector<double>& times,
                                std::uint64_t seed) {
    std::vector<double> out(times.size(), 1.0);
    const auto n = static_cast<std::uint32_t>(starts.size());
    if (n < 2) return out;
    // Only the jump sequence matters for 1{tau_c > t}: collisions happen at
    // jump instants, so each grid interval draws its Poisson(N dt) jump count
    // and replays that many uniformly chosen (walker, direction) moves.
    Rng rng(seed);
    std::vector<Site> pos = starts;
    double prev = 0.0;
    for (std::size_t g = 0; g < times.size(); ++g) {
        const double dt = times[g] - prev;
        if (dt < 0.0) throw std::invalid_argument("pnc: time grid must be non-decreasing and >= 0");
        prev = times[g];
        if (dt > 0.0) {
            std::poisson_distribution<std::int64_t> jumps(static_cast<double>(n) * dt);
            for (auto k = jumps(rng); k > 0; --k) {
                const std::uint64_t bits = rng();
                const auto i = static_cast<std::uint32_t>(((bits >> 32) * n) >> 32);
                Site& p = pos[i];
                p = p + kSteps[bits & 3];
                for (std::uint32_t j = 0; j < n; ++j) {
                    if (j != i && pos[j] == p) {
                        std::fill(out.begin() + static_cast<std::ptrdiff_t>(g), out.end(), 0.0);
                        return out;
                    }
                }
            }
        }
    }
    return out;
}

EstimateSeries estimate_pnc_mc(const std::vector<Site>& starts, const std::vector<double>& times,
                               std::uint64_t replicas, std::uint64_t seed, unsigned threads) {
    require_distinct(starts);
    if (replicas < 1) throw std::invalid_argument("estimate_pnc_mc: replicas must be >= 1");
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] < 0.0 || (i && times[i] < times[i - 1]))
            throw std::invalid_argument("estimate_pnc_mc: time grid must be non-decreasing and >= 0");
    if (threads == 0) threads = default_threads();
    return run_replicas(times, replicas, threads,
                        [&](std::uint64_t r) { return pnc_replica(starts, times, replica_seed(seed, r)); });
}

double exact_pnc_pair(const Site& start_offset, double t) {
    return exact_pnc_pair_series(start_offset, {t}).front();
}

std::vector<double> exact_pnc_pair_series(const Site& start_offset, const std::vector<double>& times) {
    if (start_offset == kOrigin) throw std::invalid_argument("exact_pnc_pair: offset must differ from the origin");
    double horizon = 0.0;
    for (double t : times) {
        if (!(t >= 0.0)) throw std::invalid_argument("exact_pnc_pair: t must be >= 0");
        horizon = std::max(horizon, 2.0 * t);
    }
    // The difference of two rate-one walks is a rate-two walk, so
    // P[tau_12 > t] is the killed survival at time 2t.
    const auto curve =
        killed_survival_curve(start_offset, jump_truncation(horizon), default_radius(horizon, start_offset));
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(t == 0.0 ? 1.0 : curve.survival_at(2.0 * t));
    return out;
}

double pnc_ere_exact(int n_walkers, double t0, double p0, double t) {
    return p0 * std::pow(std::log(t0) / std::log(t), choose2(n_walkers));
}

EstimateSeries pnc_ere_solve(int n_walkers, double t0, double p0, double t_max,
                             std::optional<std::vector<double>> grid) {
    if (n_walkers < 1) throw std::invalid_argument("pnc_ere_solve: N must be >= 1");
    if (!(t0 > 1.0)) throw std::invalid_argument("pnc_ere_solve: t0 must be > 1");
    if (!(p0 > 0.0 && p0 <= 1.0)) throw std::invalid_argument("pnc_ere_solve: p0 must lie in (0, 1]");
    OdeSpec spec;
    spec.t0 = t0;
    spec.y0 = p0;
    spec.rhs_kind = RhsKind::pnc_ere;
    spec.n_walkers = n_walkers;
    spec.t_max = t_max;
    return solve_ode(spec, std::move(grid));
}

PowerLawFit fit_log_power(const EstimateSeries& series, int n_walkers,
                          std::optional<std::pair<double, double>> window) {
    if (series.size() == 0) throw std::invalid_argument("fit_log_power: empty series");
    const double t_last = series.times.back();
    const auto [lo, hi] = window.value_or(std::pair{t_last / 100.0, t_last});
    if (!(lo < hi)) throw std::invalid_argument("fit_log_power: window needs t_min < t_max");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double t = series.times[i];
        if (t < lo || t > hi) continue;
        if (!(t > 1.0)) throw std::invalid_argument("fit_log_power: window times must exceed 1");
        if (!(series.mean[i] > 0.0)) throw std::invalid_argument("fit_log_power: non-positive mean in window");
        xs.push_back(std::log(std::log(t)));
        ys.push_back(std::log(series.mean[i]));
    }
    if (xs.size() < 2) throw std::invalid_argument("fit_log_power: fewer than two points in window");
    const double m = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= m, my /= m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_log_power: degenerate window");
    PowerLawFit fit;
    fit.exponent = sxy / sxx;
    fit.constant = my - fit.exponent * mx;
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.constant + fit.exponent * xs[i]);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / m);
    fit.t_min = lo;
    fit.t_max = hi;
    fit.expected_exponent = -static_cast<double>(choose2(n_walkers));
    return fit;
}

}  // namespace crw
