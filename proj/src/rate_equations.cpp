#include "crw/rate_equations.hpp"

#include <boost/numeric/odeint.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "crw/finite_system.hpp"

namespace crw {
namespace odeint = boost::numeric::odeint;

std::string to_string(ReactionMode m) { return m == ReactionMode::coalesce ? "coalesce" : "annihilate"; }

ReactionMode parse_reaction_mode(const std::string& s) {
    if (s == "coalesce") return ReactionMode::coalesce;
    if (s == "annihilate") return ReactionMode::annihilate;
    throw std::invalid_argument("unknown mode '" + s + "' (expected coalesce|annihilate)");
}

std::string to_string(RhsKind k) {
    switch (k) {
        case RhsKind::rho1_ere: return "rho1_ere";
        case RhsKind::rho1_mean_field: return "rho1_mean_field";
        case RhsKind::pnc_ere: return "pnc_ere";
        case RhsKind::smoluchowski: return "smoluchowski";
        case RhsKind::zero: return "zero";
    }
    return "?";
}

RhsKind parse_rhs_kind(const std::string& s) {
    for (auto k : {RhsKind::rho1_ere, RhsKind::rho1_mean_field, RhsKind::pnc_ere, RhsKind::smoluchowski,
                   RhsKind::zero})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown ODE kind '" + s + "'");
}

void validate(const OdeSpec& spec) {
    if (!(spec.t_max >= spec.t0)) throw std::invalid_argument("ode: t_max must be >= t0");
    switch (spec.rhs_kind) {
        case RhsKind::rho1_ere:
        case RhsKind::pnc_ere:
            if (!(spec.t0 > 1.0)) throw std::invalid_argument("ode: t0 must be > 1 so that log t0 > 0");
            break;
        case RhsKind::smoluchowski:
            if (!(spec.r0 > 0.0)) throw std::invalid_argument("ode: r0 must be > 0");
            if (!(spec.t0 > std::max(1.0, spec.r0 * spec.r0 * std::numbers::e)))
                throw std::invalid_argument("ode: need t0 > max(1, r0^2 e)");
            break;
        case RhsKind::rho1_mean_field:
        case RhsKind::zero:
            break;
    }
    if (spec.rhs_kind != RhsKind::zero && !(spec.y0 > 0.0)) throw std::invalid_argument("ode: y0 must be > 0");
    if (spec.rhs_kind == RhsKind::pnc_ere && spec.n_walkers < 1)
        throw std::invalid_argument("ode: n_walkers must be >= 1");
}

double ode_rhs(const OdeSpec& spec, double t, double y) {
    constexpr double pi = std::numbers::pi;
    switch (spec.rhs_kind) {
        case RhsKind::rho1_ere: return -pi * y * y / std::log(t);
        case RhsKind::rho1_mean_field: return -pi * y * y;
        case RhsKind::pnc_ere: return -choose2(spec.n_walkers) * y / (t * std::log(t));
        case RhsKind::smoluchowski: return -2.0 * pi * y * y / std::log(std::sqrt(t) / spec.r0);
        case RhsKind::zero: return 0.0;
    }
    return 0.0;
}

EstimateSeries solve_ode(const OdeSpec& spec, std::optional<std::vector<double>> grid, const SolverOptions& options) {
    validate(spec);
    std::vector<double> times = grid ? std::move(*grid)
                                     : (spec.t_max > spec.t0 ? geometric_grid(spec.t0, spec.t_max, 64)
                                                             : std::vector<double>{spec.t0});
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < spec.t0 || times[i] > spec.t_max) throw std::invalid_argument("ode: grid outside [t0, t_max]");
        if (i && times[i] < times[i - 1]) throw std::invalid_argument("ode: grid must be non-decreasing");
    }

    using Stepper = odeint::runge_kutta_dopri5<double, double, double, double, odeint::vector_space_algebra>;
    auto system = [&spec](const double& y, double& dydt, double t) { dydt = ode_rhs(spec, t, y); };

    std::vector<double> values;
    values.reserve(times.size());
    double y = spec.y0;
    double t = spec.t0;
    for (double target : times) {
        if (target > t) {
            if (options.fixed_step > 0.0) {
                Stepper stepper;
                while (t < target) {
                    const double h = std::min(options.fixed_step, target - t);
                    stepper.do_step(system, y, t, h);
                    t = (target - t <= options.fixed_step) ? target : t + h;
                }
            } else {
                auto controlled =
                    odeint::make_controlled(options.abs_tol, options.rel_tol, options.max_step, Stepper());
                const double dt0 = std::min(options.max_step, 1e-3 * std::max(1.0, t));
                odeint::integrate_adaptive(controlled, system, y, t, target, dt0);
                t = target;
            }
        }
        values.push_back(y);
    }
    return EstimateSeries::exact(std::move(times), std::move(values));
}

EstimateSeries rho1_ere_solve(const OdeSpec& spec, std::optional<std::vector<double>> grid,
                              const SolverOptions& options) {
    if (!(spec.y0 > 0.0)) throw std::invalid_argument("rho1_ere_solve: y0 must be > 0");
    return solve_ode(spec, std::move(grid), options);
}

EstimateSeries smoluchowski_solve(const OdeSpec& spec, std::optional<std::vector<double>> grid,
                                  const SolverOptions& options) {
    return solve_ode(spec, std::move(grid), options);
}

double rho1_asymptotic(double t) {
    if (!(t > 1.0)) throw std::invalid_argument("rho1_asymptotic: t must be > 1");
    return std::log(t) / (std::numbers::pi * t);
}

double rhoN_asymptotic(const AsymptoticParams& params, double t) {
    if (!(t > 1.0)) throw std::invalid_argument("rhoN_asymptotic: t must be > 1");
    if (params.n < 1) throw std::invalid_argument("rhoN_asymptotic: N must be >= 1");
    if (!(params.c0 > 0.0)) throw std::invalid_argument("rhoN_asymptotic: c0 must be > 0");
    const int n = params.n;
    const double coalescing =
        params.c0 * std::pow(std::log(t), n - choose2(n)) * std::pow(t, -n) / std::pow(std::numbers::pi, n);
    // (2 pi)^N = 2^N pi^N; ldexp keeps the mode ratio exact.
    return params.mode == ReactionMode::coalesce ? coalescing : std::ldexp(coalescing, -n);
}

}  // namespace crw
