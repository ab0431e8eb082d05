#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "crw/estimate_series.hpp"

namespace crw {

enum class ReactionMode { coalesce, annihilate };

std::string to_string(ReactionMode m);
ReactionMode parse_reaction_mode(const std::string& s);

/// Right-hand sides of the scalar ODE families:
///   rho1_ere          drho/dt = -pi rho^2 / log t
///   rho1_mean_field   drho/dt = -pi rho^2            (log-free, closed form)
///   pnc_ere           dp/dt   = -(N choose 2) p / (t log t)
///   smoluchowski      drho/dt = -2 pi rho^2 / log(sqrt(t) / r0)
///   zero              dy/dt   = 0                      (test hook)
enum class RhsKind { rho1_ere, rho1_mean_field, pnc_ere, smoluchowski, zero };

std::string to_string(RhsKind k);
RhsKind parse_rhs_kind(const std::string& s);

struct OdeSpec {
    double t0 = 10.0;
    double y0 = 1.0;
    RhsKind rhs_kind = RhsKind::rho1_ere;
    int n_walkers = 2;  // pnc_ere only
    double r0 = 1.0;    // smoluchowski only
    double t_max = 1e6;
};

struct SolverOptions {
    double rel_tol = 1e-12;
    double abs_tol = 0.0;
    /// Upper bound on the step; +inf leaves the controller free.
    double max_step = std::numeric_limits<double>::infinity();
    /// When > 0 the adaptive controller is bypassed and steps of this size
    /// are taken (used for order checks).
    double fixed_step = 0.0;
};

struct AsymptoticParams {
    int n = 1;
    double c0 = 1.0;
    ReactionMode mode = ReactionMode::coalesce;
};

/// Checks the domain restrictions of `spec` (log terms positive at t0).
void validate(const OdeSpec& spec);

double ode_rhs(const OdeSpec& spec, double t, double y);

/// Integrates with Dormand-Prince 5(4) and samples on `grid` (default: 64
/// geometric points on [t0, t_max]). Grid times must lie in [t0, t_max].
EstimateSeries solve_ode(const OdeSpec& spec, std::optional<std::vector<double>> grid = std::nullopt,
                         const SolverOptions& options = {});

EstimateSeries rho1_ere_solve(const OdeSpec& spec, std::optional<std::vector<double>> grid = std::nullopt,
                              const SolverOptions& options = {});

EstimateSeries smoluchowski_solve(const OdeSpec& spec, std::optional<std::vector<double>> grid = std::nullopt,
                                  const SolverOptions& options = {});

/// log t / (pi t).
double rho1_asymptotic(double t);

/// c0 (log t)^(N - (N choose 2)) t^-N / pi^N, with (2 pi)^N when annihilating.
double rhoN_asymptotic(const AsymptoticParams& params, double t);

}  // namespace crw
