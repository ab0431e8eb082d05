#include "crw/oned_exact.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace crw {

SkewMatrix::SkewMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {
    if (n < 0) throw std::invalid_argument("SkewMatrix: negative dimension");
}

void SkewMatrix::set(int i, int j, double v) {
    if (i == j) throw std::invalid_argument("SkewMatrix: diagonal is fixed at zero");
    a_[static_cast<std::size_t>(i) * n_ + j] = v;
    a_[static_cast<std::size_t>(j) * n_ + i] = -v;
}

OrderedStarts1D::OrderedStarts1D(std::vector<double> xs) : xs_(std::move(xs)) {
    for (std::size_t i = 1; i < xs_.size(); ++i)
        if (!(xs_[i] > xs_[i - 1])) throw std::invalid_argument("starts must be strictly increasing");
}

double phi(double x) { return std::erf(x); }

namespace {

double expand(const SkewMatrix& m, std::vector<int>& idx) {
    if (idx.empty()) return 1.0;
    if (idx.size() == 2) return m(idx[0], idx[1]);
    const int first = idx[0];
    double total = 0.0;
    for (std::size_t k = 1; k < idx.size(); ++k) {
        const double a = m(first, idx[k]);
        if (a == 0.0) continue;
        std::vector<int> rest;
        rest.reserve(idx.size() - 2);
        for (std::size_t q = 1; q < idx.size(); ++q)
            if (q != k) rest.push_back(idx[q]);
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        total += sign * a * expand(m, rest);
    }
    return total;
}

void require_even(int n) {
    if (n % 2 != 0) throw std::invalid_argument("Pfaffian requires an even dimension");
}

}  // namespace

double pfaffian_expansion(const SkewMatrix& m) {
    require_even(m.n());
    std::vector<int> idx(static_cast<std::size_t>(m.n()));
    for (int i = 0; i < m.n(); ++i) idx[i] = i;
    return expand(m, idx);
}

double pfaffian_elimination(SkewMatrix m) {
    const int n = m.n();
    require_even(n);
    std::vector<double> a = m.entries();
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
    double result = 1.0;
    for (int k = 0; k + 1 < n; k += 2) {
        int kp = k + 1;
        for (int i = k + 2; i < n; ++i)
            if (std::abs(at(i, k)) > std::abs(at(kp, k))) kp = i;
        if (kp != k + 1) {
            for (int i = 0; i < n; ++i) std::swap(at(k + 1, i), at(kp, i));
            for (int i = 0; i < n; ++i) std::swap(at(i, k + 1), at(i, kp));
            result = -result;
        }
        const double pivot = at(k, k + 1);
        if (pivot == 0.0) return 0.0;
        result *= pivot;
        if (k + 2 < n) {
            std::vector<double> tau(static_cast<std::size_t>(n - k - 2));
            for (int i = k + 2; i < n; ++i) tau[i - k - 2] = at(k, i) / pivot;
            for (int i = k + 2; i < n; ++i)
                for (int j = k + 2; j < n; ++j)
                    at(i, j) += tau[i - k - 2] * at(j, k + 1) - tau[j - k - 2] * at(i, k + 1);
        }
    }
    return result;
}

double pfaffian(const SkewMatrix& m) {
    return m.n() <= 8 ? pfaffian_expansion(m) : pfaffian_elimination(m);
}

double determinant(std::vector<double> a, int n) {
    if (static_cast<std::size_t>(n) * n != a.size()) throw std::invalid_argument("determinant: size mismatch");
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(at(i, k)) > std::abs(at(p, k))) p = i;
        if (at(p, k) == 0.0) return 0.0;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
            det = -det;
        }
        det *= at(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double f = at(i, k) / at(k, k);
            for (int j = k + 1; j < n; ++j) at(i, j) -= f * at(k, j);
        }
    }
    return det;
}

SkewMatrix pnc_matrix_1d(std::span<const double> xs, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
    const int n = static_cast<int>(xs.size());
    SkewMatrix m(n);
    const double scale = 1.0 / std::sqrt(4.0 * t);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) m.set(i, j, phi((xs[j] - xs[i]) * scale));
    return m;
}

namespace {

using Poly = std::vector<double>;

Poly truncated_product(const Poly& a, const Poly& b) {
    Poly c(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; i + j < c.size(); ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

Poly expand_poly(const std::vector<std::vector<Poly>>& m, const std::vector<int>& idx, std::size_t degree) {
    if (idx.empty()) {
        Poly one(degree + 1, 0.0);
        one[0] = 1.0;
        return one;
    }
    if (idx.size() == 2) return m[idx[0]][idx[1]];
    Poly total(degree + 1, 0.0);
    for (std::size_t k = 1; k < idx.size(); ++k) {
        std::vector<int> rest;
        for (std::size_t q = 1; q < idx.size(); ++q)
            if (q != k) rest.push_back(idx[q]);
        const Poly term = truncated_product(m[idx[0]][idx[k]], expand_poly(m, rest, degree));
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        for (std::size_t q = 0; q <= degree; ++q) total[q] += sign * term[q];
    }
    return total;
}

// Taylor expansion of the Pfaffian in u = (x_N - x_1) / sqrt(4t). The value is
// an alternating function of the starts, hence divisible by their Vandermonde
// product, so every order below N(N-1)/2 vanishes identically and is dropped
// instead of being left to cancel in floating point.
double pfaffian_series(std::span<const double> xs, double u) {
    const int n = static_cast<int>(xs.size());
    const double span = xs.back() - xs.front();
    const std::size_t lowest = static_cast<std::size_t>(n * (n - 1) / 2);
    const std::size_t degree = lowest + 48;
    const double c = 2.0 / std::sqrt(std::numbers::pi);
    std::vector<std::vector<Poly>> m(n, std::vector<Poly>(n));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = (xs[j] - xs[i]) / span;
            Poly p(degree + 1, 0.0);
            double dpow = d, fact = 1.0;
            for (std::size_t k = 0; 2 * k + 1 <= degree; ++k) {
                if (k > 0) fact *= static_cast<double>(k);
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                p[2 * k + 1] = sign * c * dpow / (fact * static_cast<double>(2 * k + 1));
                dpow *= d * d;
            }
            m[i][j] = std::move(p);
        }
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[i] = i;
    const Poly pf = expand_poly(m, idx, degree);
    double value = 0.0;
    for (std::size_t q = degree + 1; q-- > lowest;) value = value * u + pf[q];
    return value * std::pow(u, static_cast<double>(lowest));
}

}  // namespace

double pnc_pfaffian_1d_closure(std::span<const double> xs, double t) {
    if (xs.size() % 2 != 0) throw std::invalid_argument("pnc_pfaffian_1d: N must be even");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (xs[i] < xs[i - 1]) throw std::invalid_argument("pnc_pfaffian_1d: starts must be non-decreasing");
    if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
    if (xs.size() >= 4 && xs.size() <= 8 && xs.back() > xs.front()) {
        const double u = (xs.back() - xs.front()) / std::sqrt(4.0 * t);
        if (u <= kSeriesSwitch) return pfaffian_series(xs, u);
    }
    return pfaffian(pnc_matrix_1d(xs, t));
}

double pnc_pfaffian_1d(const OrderedStarts1D& starts, double t) {
    return pnc_pfaffian_1d_closure(starts.xs(), t);
}

double gaussian_kernel(double x, double y, double t) {
    const double d = y - x;
    return std::exp(-d * d / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
}

double km_density(const OrderedStarts1D& starts, std::span<const double> ends, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("km_density: t must be > 0");
    const int n = starts.size();
    if (static_cast<int>(ends.size()) != n) throw std::invalid_argument("km_density: length mismatch");
    for (std::size_t i = 1; i < ends.size(); ++i)
        if (ends[i] < ends[i - 1]) throw std::invalid_argument("km_density: ends must be non-decreasing");
    std::vector<double> g(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g[static_cast<std::size_t>(i) * n + j] = gaussian_kernel(starts.xs()[i], ends[j], t);
    return determinant(std::move(g), n);
}

double vandermonde(std::span<const double> xs) {
    double v = 1.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j) v *= xs[j] - xs[i];
    return v;
}

double vandermonde_asymptotic(std::span<const double> xs, double t, double cN) {
    if (!(t > 0.0)) throw std::invalid_argument("vandermonde_asymptotic: t must be > 0");
    if (xs.size() % 2 != 0) throw std::invalid_argument("vandermonde_asymptotic: N must be even");
    const auto n = static_cast<double>(xs.size());
    return cN * vandermonde(xs) / std::pow(t, n * (n - 1) / 4.0);
}

double vandermonde_ratio(const OrderedStarts1D& starts, double t) {
    return pnc_pfaffian_1d(starts, t) / vandermonde_asymptotic(starts.xs(), t, 1.0);
}

}  // namespace crw
