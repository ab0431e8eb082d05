#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "crw/estimate_series.hpp"
#include "crw/site.hpp"

namespace crw {

/// N labelled, non-interacting walkers and the first meeting time of every
/// pair that has met so far.
struct WalkerEnsemble {
    std::vector<Site> starts;
    std::vector<Site> positions;
    double clock = 0.0;
    /// Key (i, j) with i < j.
    std::map<std::pair<int, int>, double> pair_collisions;

    friend bool operator==(const WalkerEnsemble&, const WalkerEnsemble&) = default;
};

/// Least-squares fit of log(mean) = constant + exponent * log(log t).
struct PowerLawFit {
    double exponent = 0.0;
    /// Estimate of log c0.
    double constant = 0.0;
    double residual_rms = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
    /// -(N choose 2), for comparison.
    double expected_exponent = 0.0;
};

/// Throws std::invalid_argument on duplicate starts.
void require_distinct(const std::vector<Site>& starts);

WalkerEnsemble simulate_ensemble(const std::vector<Site>& starts, double t_max, std::uint64_t seed);

/// Non-collision indicator 1{tau_c > t} along one replica, for every grid
/// time. Grid must be non-decreasing and non-negative.
std::vector<double> pnc_replica(const std::vector<Site>& starts, const std::vector<double>& times,
                                std::uint64_t seed);

EstimateSeries estimate_pnc_mc(const std::vector<Site>& starts, const std::vector<double>& times,
                               std::uint64_t replicas, std::uint64_t seed, unsigned threads = 0);

/// P[tau_12 > t] for two walkers started start_offset apart: survival of the
/// killed walk at time 2t.
double exact_pnc_pair(const Site& start_offset, double t);

/// Same quantity on a whole grid from a single killed-survival curve.
std::vector<double> exact_pnc_pair_series(const Site& start_offset, const std::vector<double>& times);

/// Solves dp/dt = -(N choose 2) p / (t log t) from p(t0) = p0 and samples
/// the solution on a geometric grid up to t_max (or on `grid` when given).
EstimateSeries pnc_ere_solve(int n_walkers, double t0, double p0, double t_max,
                             std::optional<std::vector<double>> grid = std::nullopt);

/// Closed form p0 (log t0 / log t)^(N choose 2).
double pnc_ere_exact(int n_walkers, double t0, double p0, double t);

/// Fits over grid points with t in [t_min, t_max]; default window is
/// [t_last / 100, t_last].
PowerLawFit fit_log_power(const EstimateSeries& series, int n_walkers,
                          std::optional<std::pair<double, double>> window = std::nullopt);

constexpr int choose2(int n) { return n * (n - 1) / 2; }

}  // namespace crw
