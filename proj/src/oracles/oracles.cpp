#include "crw/oracles.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/expint.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "crw/lattice_walks.hpp"
#include "crw/oned_exact.hpp"
#include "crw/parallel.hpp"
#include "crw/random.hpp"

namespace crw::oracle {
namespace {

double log_binom(std::int64_t n, std::int64_t k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// P[k-step simple walk on Z ends at x].
double binomial_step(std::int64_t k, std::int64_t x) {
    x = std::abs(x);
    if (x > k || (k - x) % 2 != 0) return 0.0;
    return std::exp(log_binom(k, (k + x) / 2) - k * std::log(2.0));
}

}  // namespace

double line_transition(double t, std::int64_t x) {
    const double mean = 0.5 * t;
    if (mean == 0.0) return x == 0 ? 1.0 : 0.0;
    const int kmax = jump_truncation(mean);
    double sum = 0.0;
    for (std::int64_t k = std::abs(x); k <= kmax; k += 2)
        sum += std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0)) * binomial_step(k, x);
    return sum;
}

double free_transition_product(double t, const Site& z) { return line_transition(t, z.x) * line_transition(t, z.y); }

std::vector<double> renewal_survival(const Site& source, int max_steps) {
    if (source == kOrigin) throw std::invalid_argument("renewal_survival: source must differ from the origin");
    // Rotating by 45 degrees turns one 2D step into independent +-1 steps of
    // u = x + y and v = x - y.
    const std::int64_t u = source.x + source.y, v = source.x - source.y;
    auto hit_prob = [](std::int64_t k, std::int64_t a, std::int64_t b) {
        return binomial_step(k, a) * binomial_step(k, b);
    };
    const auto K = static_cast<std::size_t>(max_steps);
    std::vector<double> ret(K + 1), first(K + 1, 0.0);
    for (std::size_t m = 0; m <= K; ++m) ret[m] = hit_prob(static_cast<std::int64_t>(m), 0, 0);
    std::vector<double> surv(K + 1, 1.0);
    double cumulative = 0.0;
    for (std::size_t k = 1; k <= K; ++k) {
        double h = hit_prob(static_cast<std::int64_t>(k), u, v);
        if (h != 0.0) {
            for (std::size_t j = 1; j < k; ++j)
                if (first[j] != 0.0) h -= first[j] * ret[k - j];
            first[k] = h;
            cumulative += h;
        }
        surv[k] = 1.0 - cumulative;
    }
    return surv;
}

double poisson_mix(const std::vector<double>& curve, double t, double rate) {
    const double mean = rate * t;
    const int kmax = jump_truncation(mean);
    if (kmax >= static_cast<int>(curve.size())) throw std::out_of_range("poisson_mix: curve too short");
    const auto w = poisson_weights(mean, kmax);
    double s = 0.0;
    for (int k = 0; k <= kmax; ++k) s += w[k] * curve[k];
    return s;
}

double ordered_km_integral(std::span<const double> starts, double t, int grid_points) {
    const int n = static_cast<int>(starts.size());
    if (n == 0) return 1.0;
    const double sd = std::sqrt(t);
    const double lo = *std::min_element(starts.begin(), starts.end()) - 12.0 * sd;
    const double hi = *std::max_element(starts.begin(), starts.end()) + 12.0 * sd;
    const double h = (hi - lo) / (grid_points - 1);
    std::vector<double> ys(static_cast<std::size_t>(grid_points));
    for (int k = 0; k < grid_points; ++k) ys[k] = lo + h * k;

    std::vector<std::vector<double>> dens(static_cast<std::size_t>(n), std::vector<double>(ys.size()));
    for (int i = 0; i < n; ++i)
        for (std::size_t k = 0; k < ys.size(); ++k) dens[i][k] = gaussian_kernel(starts[i], ys[k], t);

    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double total = 0.0;
    std::vector<double> acc(ys.size()), next(ys.size());
    do {
        // sign of the permutation by counting inversions
        int inv = 0;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) inv += perm[a] > perm[b];
        std::fill(acc.begin(), acc.end(), 1.0);
        for (int level = 0; level < n; ++level) {
            const auto& f = dens[perm[level]];
            next[0] = 0.0;
            for (std::size_t k = 1; k < ys.size(); ++k)
                next[k] = next[k - 1] + 0.5 * h * (f[k - 1] * acc[k - 1] + f[k] * acc[k]);
            std::swap(acc, next);
        }
        total += (inv % 2 ? -1.0 : 1.0) * acc.back();
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

EstimateSeries brownian_pnc_mc(std::span<const double> starts, double t, std::uint64_t paths, int steps,
                               std::uint64_t seed, unsigned threads) {
    const std::vector<double> x0(starts.begin(), starts.end());
    const double dt = t / steps;
    const double sdt = std::sqrt(dt);
    if (threads == 0) threads = default_threads();
    return run_replicas({t}, paths, threads, [&](std::uint64_t r) {
        Rng rng(replica_seed(seed, r));
        std::normal_distribution<double> normal;
        std::vector<double> x = x0, y(x0.size());
        double weight = 1.0;
        for (int s = 0; s < steps && weight > 0.0; ++s) {
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + sdt * normal(rng);
            for (std::size_t i = 0; i + 1 < x.size(); ++i) {
                const double a = x[i + 1] - x[i];
                const double b = y[i + 1] - y[i];
                if (b <= 0.0) {
                    weight = 0.0;
                    break;
                }
                // Difference of two standard motions has variance rate 2.
                weight *= 1.0 - std::exp(-a * b / dt);
            }
            std::swap(x, y);
        }
        return std::vector<double>{weight};
    });
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    struct Rec {
        const std::function<double(double)>& f;
        double run(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) const {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
            return run(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + run(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }
    };
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return Rec{f}.run(a, b, fa, fm, fb, whole, tol, 50);
}

double eigen_determinant(const std::vector<double>& a, int n) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = a[static_cast<std::size_t>(i) * n + j];
    return m.partialPivLu().determinant();
}

double rho1_ere_exact(double t0, double y0, double t) {
    using boost::math::expint;
    const double li = expint(std::log(t)) - expint(std::log(t0));
    return 1.0 / (1.0 / y0 + std::numbers::pi * li);
}

}  // namespace crw::oracle
