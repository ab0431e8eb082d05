#include "crw/lattice_walks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace crw {
namespace {

/// Kahan-compensated sum.
class CompensatedSum {
public:
    void add(double v) {
        const double y = v - c_;
        const double t = sum_ + y;
        c_ = (t - sum_) - y;
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

/// Discrete-time nearest-neighbour walk on a box of half-width R with an
/// absorbing frame one cell outside. The buffer carries a second zero frame
/// so the stencil never reads out of range.
class BoxWalk {
public:
    BoxWalk(int radius, const Site& start, bool kill_at_origin)
        : r_(radius), w_(2 * radius + 5), kill_(kill_at_origin),
          cur_(static_cast<std::size_t>(w_) * w_, 0.0), next_(cur_.size(), 0.0) {
        if (sup_norm(start) > radius) throw std::invalid_argument("BoxWalk: start outside box");
        cur_[index(start.x, start.y)] = 1.0;
        xlo_ = xhi_ = static_cast<int>(start.x);
        ylo_ = yhi_ = static_cast<int>(start.y);
    }

    /// One jump of the walk; returns mass killed at the origin by this jump.
    double step() {
        const int lim = r_ + 1;
        const int nxlo = std::max(xlo_ - 1, -lim), nxhi = std::min(xhi_ + 1, lim);
        const int nylo = std::max(ylo_ - 1, -lim), nyhi = std::min(yhi_ + 1, lim);
        const double* c = cur_.data();
        double* n = next_.data();
        for (int y = nylo; y <= nyhi; ++y) {
            const std::size_t row = index(0, y);
            for (int x = nxlo; x <= nxhi; ++x) {
                const std::size_t i = row + x;
                n[i] = 0.25 * ((c[i - 1] + c[i + 1]) + (c[i - w_] + c[i + w_]));
            }
        }
        xlo_ = nxlo, xhi_ = nxhi, ylo_ = nylo, yhi_ = nyhi;
        std::swap(cur_, next_);

        double killed = 0.0;
        if (kill_ && in_active(0, 0)) {
            double& o = cur_[index(0, 0)];
            killed = o;
            o = 0.0;
        }
        // Absorbing frame at sup-norm R + 1.
        if (xlo_ == -lim) absorb_column(-lim);
        if (xhi_ == lim) absorb_column(lim);
        if (ylo_ == -lim) absorb_row(-lim);
        if (yhi_ == lim) absorb_row(lim);
        return killed;
    }

    /// acc[box index] += weight * current mass, over the interior box.
    void accumulate(std::vector<double>& acc, double weight) const {
        const int side = 2 * r_ + 1;
        const int ylo = std::max(ylo_, -r_), yhi = std::min(yhi_, r_);
        const int xlo = std::max(xlo_, -r_), xhi = std::min(xhi_, r_);
        for (int y = ylo; y <= yhi; ++y) {
            const double* src = &cur_[index(0, y)];
            double* dst = &acc[static_cast<std::size_t>(y + r_) * side + r_];
            for (int x = xlo; x <= xhi; ++x) dst[x] += weight * src[x];
        }
    }

    [[nodiscard]] double escaped() const { return escaped_; }

private:
    [[nodiscard]] std::size_t index(std::int64_t x, std::int64_t y) const {
        return static_cast<std::size_t>(y + r_ + 2) * w_ + static_cast<std::size_t>(x + r_ + 2);
    }
    [[nodiscard]] bool in_active(int x, int y) const {
        return x >= xlo_ && x <= xhi_ && y >= ylo_ && y <= yhi_;
    }
    void absorb_column(int x) {
        for (int y = ylo_; y <= yhi_; ++y) take(x, y);
    }
    void absorb_row(int y) {
        // Corners were already taken by the column pass.
        for (int x = std::max(xlo_, -r_); x <= std::min(xhi_, r_); ++x) take(x, y);
    }
    void take(int x, int y) {
        double& v = cur_[index(x, y)];
        escaped_ += v;
        v = 0.0;
    }

    int r_;
    int w_;
    bool kill_;
    std::vector<double> cur_, next_;
    int xlo_, xhi_, ylo_, yhi_;
    double escaped_ = 0.0;
};

void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("time must be finite and >= 0");
}

}  // namespace

double TransitionTable::at(const Site& z) const {
    if (!contains(z)) return 0.0;
    return probs[static_cast<std::size_t>(z.y + radius) * width() + static_cast<std::size_t>(z.x + radius)];
}

double KilledTable::at(const Site& z) const {
    if (!contains(z)) return 0.0;
    return probs[static_cast<std::size_t>(z.y + radius) * width() + static_cast<std::size_t>(z.x + radius)];
}

int jump_truncation(double t) {
    require_time(t);
    return static_cast<int>(std::floor(t + 12.0 * std::sqrt(t) + 50.0));
}

int default_radius(double t, const Site& source) {
    require_time(t);
    const auto r = static_cast<std::int64_t>(std::ceil(4.0 * std::sqrt(t))) + sup_norm(source);
    return static_cast<int>(std::max<std::int64_t>(r, 1));
}

std::vector<double> poisson_weights(double mean, int kmax, double* omitted) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson_weights: negative mean");
    std::vector<double> w(static_cast<std::size_t>(kmax) + 1, 0.0);
    if (mean == 0.0) {
        w[0] = 1.0;
    } else {
        const double lm = std::log(mean);
        for (int k = 0; k <= kmax; ++k) w[k] = std::exp(k * lm - mean - std::lgamma(k + 1.0));
    }
    if (omitted) {
        CompensatedSum s;
        for (double v : w) s.add(v);
        *omitted = std::max(0.0, 1.0 - s.value());
    }
    return w;
}

TransitionTable build_transition_table(double t, int radius) {
    require_time(t);
    if (radius < 1) throw std::invalid_argument("build_transition_table: radius must be >= 1");
    TransitionTable table;
    table.time = t;
    table.radius = radius;
    table.jump_truncation = jump_truncation(t);
    const int side = 2 * radius + 1;
    table.probs.assign(static_cast<std::size_t>(side) * side, 0.0);

    const auto weights = poisson_weights(t, table.jump_truncation);
    BoxWalk walk(radius, kOrigin, false);
    walk.accumulate(table.probs, weights[0]);
    for (int k = 1; k <= table.jump_truncation; ++k) {
        walk.step();
        if (weights[k] > 0.0) walk.accumulate(table.probs, weights[k]);
    }
    CompensatedSum total;
    for (double p : table.probs) total.add(p);
    table.tail_mass = 1.0 - total.value();
    return table;
}

double transition_lclt(double t, const Site& z) {
    if (!(t > 0.0)) throw std::invalid_argument("transition_lclt: t must be > 0");
    return std::exp(-static_cast<double>(norm2(z)) / t) / (std::numbers::pi * t);
}

KilledTable build_killed_table(double t, const Site& source, int radius) {
    require_time(t);
    if (source == kOrigin) throw std::invalid_argument("build_killed_table: source must differ from the origin");
    if (radius <= 0) radius = default_radius(t, source);
    if (sup_norm(source) > radius) throw std::invalid_argument("build_killed_table: source outside box");
    KilledTable table;
    table.time = t;
    table.radius = radius;
    table.source = source;
    table.jump_truncation = jump_truncation(t);
    const int side = 2 * radius + 1;
    table.probs.assign(static_cast<std::size_t>(side) * side, 0.0);

    double poisson_tail = 0.0;
    const auto weights = poisson_weights(t, table.jump_truncation, &poisson_tail);
    BoxWalk walk(radius, source, true);
    CompensatedSum hit, escaped;
    double killed = 0.0;
    walk.accumulate(table.probs, weights[0]);
    for (int k = 1; k <= table.jump_truncation; ++k) {
        killed += walk.step();
        if (weights[k] > 0.0) {
            walk.accumulate(table.probs, weights[k]);
            hit.add(weights[k] * killed);
            escaped.add(weights[k] * walk.escaped());
        }
    }
    hit.add(poisson_tail * killed);
    table.survival_mass = 1.0 - hit.value();
    table.escaped_mass = escaped.value();
    return table;
}

double KilledSurvivalCurve::hitting_at(double t, double rate) const {
    require_time(t);
    const double mean = rate * t;
    const int kmax = jump_truncation(mean);
    if (kmax > max_steps()) throw std::out_of_range("KilledSurvivalCurve: time beyond computed horizon");
    double omitted = 0.0;
    const auto w = poisson_weights(mean, kmax, &omitted);
    CompensatedSum s;
    for (int k = 0; k <= kmax; ++k)
        if (w[k] > 0.0) s.add(w[k] * hit[k]);
    s.add(omitted * hit[kmax]);
    return s.value();
}

KilledSurvivalCurve killed_survival_curve(const Site& source, int max_steps, int radius) {
    if (source == kOrigin) throw std::invalid_argument("killed_survival_curve: source must differ from the origin");
    if (max_steps < 0) throw std::invalid_argument("killed_survival_curve: negative step count");
    // k jumps have per-coordinate variance k/2; the default box is the one
    // default_radius would pick for the matching continuous time.
    if (radius <= 0) radius = default_radius(static_cast<double>(max_steps), source);
    KilledSurvivalCurve curve;
    curve.source = source;
    curve.radius = radius;
    curve.hit.assign(static_cast<std::size_t>(max_steps) + 1, 0.0);
    BoxWalk walk(radius, source, true);
    double killed = 0.0;
    for (int k = 1; k <= max_steps; ++k) {
        killed += walk.step();
        curve.hit[k] = killed;
    }
    return curve;
}

double hitting_prob(double t, const Site& y) {
    require_time(t);
    if (y == kOrigin) return 1.0;
    if (t == 0.0) return 0.0;
    return 1.0 - build_killed_table(t, y).survival_mass;
}

double boundary_flux_F(double t, const Site& y) {
    require_time(t);
    if (y == kOrigin) throw std::invalid_argument("boundary_flux_F: y must differ from the origin");
    const auto table = build_killed_table(t, y);
    double f = 0.0;
    for (const auto& e : kSteps) f += table.at(e);
    return f;
}

double hitting_asymptotic(double t) {
    if (!(t > 1.0)) throw std::invalid_argument("hitting_asymptotic: t must be > 1");
    return std::numbers::pi / std::log(t);
}

double ld_tail_bound(double t, double r, const TailBoundParams& params) {
    if (!(t > 1.0) || !(r > 0.0)) throw std::invalid_argument("ld_tail_bound: need t > 1 and r > 0");
    if (!(params.c5 > 0.0) || !(params.c6 > 0.0)) throw std::invalid_argument("ld_tail_bound: constants must be > 0");
    return params.c5 * std::exp(-params.c6 * std::pow(std::log(t), 2.0 * r));
}

double sup_exceed_probability(double t, double level) {
    require_time(t);
    if (!(level > 0.0)) throw std::invalid_argument("sup_exceed_probability: level must be > 0");
    // |Z| >= level  <=>  |Z| >= a for the integer a = ceil(level).
    const auto a = static_cast<int>(std::ceil(level));
    const double mean = 0.5 * t;
    const int kmax = jump_truncation(mean);
    double omitted = 0.0;
    const auto w = poisson_weights(mean, kmax, &omitted);
    // States -a+1 .. a-1 plus the two absorbing ends.
    const int width = 2 * a + 1;
    std::vector<double> cur(static_cast<std::size_t>(width), 0.0), next(cur.size(), 0.0);
    cur[a] = 1.0;
    double absorbed = 0.0;
    CompensatedSum total;
    for (int k = 1; k <= kmax; ++k) {
        const int lo = std::max(1, a - k), hi = std::min(width - 2, a + k);
        for (int i = lo; i <= hi; ++i) next[i] = 0.5 * (cur[i - 1] + cur[i + 1]);
        next[0] = 0.5 * cur[1];
        next[width - 1] = 0.5 * cur[width - 2];
        absorbed += next[0] + next[width - 1];
        next[0] = next[width - 1] = 0.0;
        std::swap(cur, next);
        if (w[k] > 0.0) total.add(w[k] * absorbed);
    }
    total.add(omitted * absorbed);
    return total.value();
}

TailBoundParams calibrate_tail_bound() {
    struct Point {
        double x, logp;
    };
    std::vector<Point> pts;
    for (double t : {1e2, 1e3, 1e4}) {
        for (double r : {0.6, 1.0}) {
            const double lt = std::log(t);
            const double p = sup_exceed_probability(t, std::sqrt(t) * std::pow(lt, r));
            pts.push_back({std::pow(lt, 2.0 * r), std::log(p)});
        }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : pts) sx += p.x, sy += p.logp, sxx += p.x * p.x, sxy += p.x * p.logp;
    const double m = static_cast<double>(pts.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    TailBoundParams params;
    params.c6 = std::max(-slope, 1e-6);
    double log_c5 = -INFINITY;
    for (const auto& p : pts) log_c5 = std::max(log_c5, p.logp + params.c6 * p.x);
    params.c5 = std::exp(log_c5);
    return params;
}

}  // namespace crw
