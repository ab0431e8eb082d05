#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crw/estimate_series.hpp"
#include "crw/random.hpp"
#include "crw/rate_equations.hpp"
#include "crw/site.hpp"

namespace crw {

enum class InitKind { full, bernoulli_half };

std::string to_string(InitKind k);
InitKind parse_init_kind(const std::string& s);

/// Occupancy of an L x L torus (L a power of two) under coalescing or
/// annihilating dynamics. Sites are indexed y * L + x.
///
/// `site_to_particle` is the dense occupancy grid with back-indices into
/// `particles`, so jumps, deletions and lookups are O(1) at any density.
class OccupancyField {
public:
    OccupancyField(int L, ReactionMode mode);

    [[nodiscard]] int side() const { return L_; }
    [[nodiscard]] ReactionMode mode() const { return mode_; }
    [[nodiscard]] double clock() const { return clock_; }
    [[nodiscard]] std::size_t count() const { return particles_.size(); }
    [[nodiscard]] double density() const {
        return static_cast<double>(count()) / (static_cast<double>(L_) * L_);
    }
    [[nodiscard]] bool occupied(const Site& s) const { return site_to_particle_[wrap(s)] >= 0; }
    [[nodiscard]] const std::vector<std::uint32_t>& particle_sites() const { return particles_; }
    [[nodiscard]] Site site_of(std::uint32_t index) const {
        return {static_cast<std::int64_t>(index & mask_), static_cast<std::int64_t>(index >> shift_)};
    }

    void place(const Site& s);

    /// Advances the dynamics to t_target. Throws if t_target < clock().
    void evolve(double t_target, Rng& rng);

    friend bool operator==(const OccupancyField&, const OccupancyField&) = default;

private:
    [[nodiscard]] std::uint32_t wrap(const Site& s) const {
        return static_cast<std::uint32_t>(((s.y & mask_) << shift_) | (s.x & mask_));
    }
    void remove(std::uint32_t particle);

    int L_;
    int shift_;
    std::int64_t mask_;
    ReactionMode mode_;
    double clock_ = 0.0;
    std::vector<std::int32_t> site_to_particle_;
    std::vector<std::uint32_t> particles_;
};

/// Offsets x_1..x_N from a probe origin; the estimator checks that all are
/// occupied.
struct CorrelationSpec {
    std::vector<Site> offsets;
    /// Also average over the distinct lattice-symmetry images of the pattern.
    bool symmetrize = false;
    /// Use this single probe origin instead of averaging over all L^2.
    std::optional<Site> probe;

    [[nodiscard]] int n() const { return static_cast<int>(offsets.size()); }
};

OccupancyField init_field(int L, ReactionMode mode, InitKind init, std::uint64_t seed);
OccupancyField init_field(int L, ReactionMode mode, InitKind init, Rng& rng);

OccupancyField evolve_field(OccupancyField field, double t_target, std::uint64_t seed);

/// Fraction of probe origins at which every offset of `spec` is occupied.
double pattern_fraction(const OccupancyField& field, const CorrelationSpec& spec);

struct DensityRun {
    int L = 256;
    ReactionMode mode = ReactionMode::coalesce;
    InitKind init = InitKind::full;
    std::vector<double> times;
    std::uint64_t replicas = 1;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

/// An estimated occupation statistic together with the run it came from.
struct DensitySeries {
    EstimateSeries series;
    int L = 0;
    ReactionMode mode = ReactionMode::coalesce;
    InitKind init = InitKind::full;
    int n = 1;

    [[nodiscard]] std::vector<std::pair<std::string, std::string>> csv_columns() const;
};

/// Records every pattern at every grid time along one trajectory per replica.
std::vector<DensitySeries> estimate_patterns(const DensityRun& run, const std::vector<CorrelationSpec>& patterns);

DensitySeries estimate_rho1(const DensityRun& run);
DensitySeries estimate_rhoN(const DensityRun& run, const CorrelationSpec& spec);

struct TimeCheck {
    double t = 0;
    double lhs = 0;
    double rhs = 0;
    double slack = 0;
    bool pass = false;
};

struct StatReport {
    std::vector<TimeCheck> rows;
    std::vector<std::string> flags;
    int passes = 0;
    int failures = 0;

    [[nodiscard]] bool pass() const { return failures == 0 && flags.empty(); }
};

/// Per time: rho_N <= rho_1^N + 3 * propagated stderr.
StatReport neg_corr_report(const DensitySeries& rho1, const DensitySeries& rhoN, int N);

/// Per time: |2^N rho^a_N - rho_N| <= 3 * pooled stderr.
StatReport thinning_report(const DensitySeries& coalescing, const DensitySeries& annihilating, int N);

/// Horizon rule for the torus approximation: L >= 8 sqrt(t_max).
bool horizon_ok(int L, double t_max);

}  // namespace crw
