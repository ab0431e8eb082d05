#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace crw {

/// Per-time streaming moments of an estimated statistic.
///
/// `var_accum` is the running sum of squared deviations (Welford's M2), so
/// the sample variance at index i is var_accum[i] / (n[i] - 1). A series with
/// n == 0 everywhere is the merge identity.
struct EstimateSeries {
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> var_accum;
    std::vector<std::uint64_t> n;
    std::vector<std::string> warnings;

    EstimateSeries() = default;
    /// Empty accumulator on the given grid.
    explicit EstimateSeries(std::vector<double> grid);

    /// One replica's observations, one value per grid time.
    static EstimateSeries single(std::vector<double> grid, std::span<const double> values);
    /// Deterministic values (n = 1, zero variance), e.g. an ODE solution.
    static EstimateSeries exact(std::vector<double> grid, std::vector<double> values);

    [[nodiscard]] std::size_t size() const { return times.size(); }
    [[nodiscard]] bool empty_accumulator() const;
    [[nodiscard]] double variance(std::size_t i) const;
    [[nodiscard]] double stderr_at(std::size_t i) const;

    /// Adds one replica's observation vector (same as merging a singleton).
    void push(std::span<const double> values);
    void add_warning(const std::string& w);
};

/// Pooled moments of two series on an identical grid (Chan et al. update).
/// Throws std::invalid_argument if the grids differ.
EstimateSeries merge_estimates(const EstimateSeries& a, const EstimateSeries& b);

/// In-place form of merge_estimates.
void merge_into(EstimateSeries& into, const EstimateSeries& other);

/// Shortest round-trip decimal for a double.
std::string format_double(double v);

/// Writes header `t,mean,stderr,n` followed by one row per grid time. Extra
/// constant columns (name, value) are appended to every row when given.
void write_series_csv(std::ostream& os, const EstimateSeries& s,
                      const std::vector<std::pair<std::string, std::string>>& extra = {});
std::string series_csv(const EstimateSeries& s,
                       const std::vector<std::pair<std::string, std::string>>& extra = {});

/// Geometric grid of `points` values from t_min to t_max inclusive.
std::vector<double> geometric_grid(double t_min, double t_max, int points);

}  // namespace crw
