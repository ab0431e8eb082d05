#pragma once

#include <cstdint>
#include <vector>

#include "crw/site.hpp"

namespace crw {

/// Dense table of P_0[X_t = z] for the rate-one simple random walk on Z^2,
/// restricted to the box max(|x|,|y|) <= radius. Row-major, y outer.
struct TransitionTable {
    double time = 0.0;
    int radius = 0;
    std::vector<double> probs;
    /// 1 - sum(probs): mass outside the box plus the omitted Poisson tail.
    double tail_mass = 0.0;
    /// Largest discrete jump count included in the Poisson mixture.
    int jump_truncation = 0;

    [[nodiscard]] int width() const { return 2 * radius + 1; }
    [[nodiscard]] bool contains(const Site& z) const { return sup_norm(z) <= radius; }
    /// Probability at z, zero outside the box.
    [[nodiscard]] double at(const Site& z) const;
};

/// P_source[X_t = z, tau_0 > t]: the walk killed on hitting the origin.
struct KilledTable {
    double time = 0.0;
    int radius = 0;
    Site source;
    std::vector<double> probs;
    /// P_source[tau_0 > t]; mass that left the box is counted as surviving.
    double survival_mass = 1.0;
    /// Part of survival_mass carried by walks that left the box.
    double escaped_mass = 0.0;
    int jump_truncation = 0;

    [[nodiscard]] int width() const { return 2 * radius + 1; }
    [[nodiscard]] bool contains(const Site& z) const { return sup_norm(z) <= radius; }
    [[nodiscard]] double at(const Site& z) const;
};

struct TailBoundParams {
    double c5 = 1.0;
    double c6 = 1.0;
};

/// Largest jump count kept: floor(t + 12 sqrt(t) + 50).
int jump_truncation(double t);

/// ceil(4 sqrt(t)) plus the sup-norm of the source, at least 1.
int default_radius(double t, const Site& source = kOrigin);

/// Poisson(mean) masses for k = 0..kmax; the omitted upper tail is returned
/// through `omitted` when non-null.
std::vector<double> poisson_weights(double mean, int kmax, double* omitted = nullptr);

TransitionTable build_transition_table(double t, int radius);

/// Gaussian approximation (1 / (pi t)) exp(-|z|^2 / t).
double transition_lclt(double t, const Site& z);

/// radius <= 0 selects default_radius(t, source).
KilledTable build_killed_table(double t, const Site& source, int radius = 0);

/// Discrete-time killed survival P_source[hat tau_0 > k], k = 0..max_steps,
/// from which continuous-time survival at any t follows by Poisson mixing.
struct KilledSurvivalCurve {
    Site source;
    int radius = 0;
    /// Cumulative killed mass after k jumps.
    std::vector<double> hit;

    [[nodiscard]] int max_steps() const { return static_cast<int>(hit.size()) - 1; }
    /// P_source[tau_0 <= t] for a walk with total jump rate `rate`.
    [[nodiscard]] double hitting_at(double t, double rate = 1.0) const;
    [[nodiscard]] double survival_at(double t, double rate = 1.0) const { return 1.0 - hitting_at(t, rate); }
};

/// radius <= 0 selects a box wide enough for max_steps jumps.
KilledSurvivalCurve killed_survival_curve(const Site& source, int max_steps, int radius = 0);

/// G_t(y) = P_y[tau_0 <= t]; equal to 1 at the origin.
double hitting_prob(double t, const Site& y);

/// F_t(y) = sum over the four neighbours e of the origin of q_t(y, e).
/// For the rate-one walk dG_t(y)/dt = F_t(y) / 4.
double boundary_flux_F(double t, const Site& y);

/// pi / log t.
double hitting_asymptotic(double t);

/// c5 exp(-c6 log^{2r} t).
double ld_tail_bound(double t, double r, const TailBoundParams& params);

/// P[sup_{s<=t} |Z_s| >= level] for the rate-1/2 simple random walk on Z
/// started at 0, computed exactly (absorbing convolution, Poisson mixing).
double sup_exceed_probability(double t, double level);

/// Least-squares c6, then the smallest c5 for which the bound dominates
/// sup_exceed_probability at every t in {1e2, 1e3, 1e4}, r in {0.6, 1.0}.
TailBoundParams calibrate_tail_bound();

}  // namespace crw
