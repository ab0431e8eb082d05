#pragma once

// Independent reference computations used by the test suites and by the
// verification suite. Nothing here is on a production path.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "crw/estimate_series.hpp"
#include "crw/site.hpp"

namespace crw::oracle {

/// P_0[X_t = z] for the rate-one walk on Z^2 as the product of two
/// independent rate-1/2 walks on Z, each a Poisson mixture of binomials.
double free_transition_product(double t, const Site& z);

/// P_0[X_t = x] for the rate-1/2 simple random walk on Z.
double line_transition(double t, std::int64_t x);

/// Discrete-time survival P_source[hat tau_0 > k], k = 0..max_steps, from
/// the first-passage renewal decomposition p_k(y) = sum_j h_j u_{k-j} with
/// closed-form return probabilities. No spatial truncation.
std::vector<double> renewal_survival(const Site& source, int max_steps);

/// Poisson(rate * t) mixture of a discrete-time curve.
double poisson_mix(const std::vector<double>& curve, double t, double rate = 1.0);

/// Integral over y_1 < ... < y_N of det[g_t(x_i, y_j)], by iterated
/// cumulative trapezoid integration of every permutation term.
double ordered_km_integral(std::span<const double> starts, double t, int grid_points = 40001);

/// Bridge-corrected Brownian estimate of the 1D non-collision probability:
/// each path gets weight prod (1 - exp(-a b / dt)) over steps and adjacent
/// pairs, zero once an adjacent pair is observed out of order.
EstimateSeries brownian_pnc_mc(std::span<const double> starts, double t, std::uint64_t paths, int steps,
                               std::uint64_t seed, unsigned threads = 0);

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

/// Determinant through Eigen's partial-pivot LU.
double eigen_determinant(const std::vector<double>& a, int n);

/// Solution of drho/dt = -pi rho^2 / log t from rho(t0) = y0:
/// 1/rho = 1/y0 + pi (li(t) - li(t0)), with li(x) = Ei(log x).
double rho1_ere_exact(double t0, double y0, double t);

}  // namespace crw::oracle
