#pragma once

#include <span>
#include <vector>

namespace crw {

/// Even-dimensional antisymmetric matrix, row-major.
class SkewMatrix {
public:
    explicit SkewMatrix(int n);

    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    /// Sets (i, j) = v and (j, i) = -v. Requires i != j.
    void set(int i, int j, double v);
    [[nodiscard]] const std::vector<double>& entries() const { return a_; }

private:
    int n_;
    std::vector<double> a_;
};

/// Strictly increasing start positions x_1 < ... < x_N on the line.
class OrderedStarts1D {
public:
    explicit OrderedStarts1D(std::vector<double> xs);

    [[nodiscard]] const std::vector<double>& xs() const { return xs_; }
    [[nodiscard]] int size() const { return static_cast<int>(xs_.size()); }

private:
    std::vector<double> xs_;
};

/// 2 / sqrt(pi) * int_0^x exp(-s^2) ds.
double phi(double x);

/// Pfaffian; throws for odd n. Uses cofactor expansion along the first row
/// for n <= 8 and pivoted skew elimination (Parlett-Reid) above that.
double pfaffian(const SkewMatrix& m);
double pfaffian_expansion(const SkewMatrix& m);
double pfaffian_elimination(SkewMatrix m);

/// Determinant of an n x n row-major matrix by LU with partial pivoting.
double determinant(std::vector<double> a, int n);

/// Matrix with entries (i, j) = phi((x_j - x_i) / sqrt(4t)) for i < j.
SkewMatrix pnc_matrix_1d(std::span<const double> xs, double t);

/// Below this spread (x_N - x_1) / sqrt(4t), configurations with 4 <= N <= 8
/// are evaluated from the Taylor series of the Pfaffian in 1 / sqrt(t), whose
/// direct evaluation loses all digits to cancellation at large t.
inline constexpr double kSeriesSwitch = 1.0;

/// Non-collision probability of N (even) standard Brownian motions started
/// at `starts`, as a Pfaffian.
double pnc_pfaffian_1d(const OrderedStarts1D& starts, double t);

/// Same formula for non-decreasing positions, so coincident starts (the
/// boundary of the ordered region) can be evaluated.
double pnc_pfaffian_1d_closure(std::span<const double> xs, double t);

/// Gaussian transition density of standard Brownian motion, variance t.
double gaussian_kernel(double x, double y, double t);

/// Karlin-McGregor density det[g_t(x_i, y_j)]. Ends may repeat (density 0).
double km_density(const OrderedStarts1D& starts, std::span<const double> ends, double t);

/// prod_{i<j} (x_j - x_i).
double vandermonde(std::span<const double> xs);

/// cN * prod_{i<j} (x_j - x_i) / sqrt(t)^(N choose 2).
double vandermonde_asymptotic(std::span<const double> xs, double t, double cN);

/// pnc_pfaffian_1d / vandermonde_asymptotic(.., cN = 1): the finite-t
/// estimate of cN.
double vandermonde_ratio(const OrderedStarts1D& starts, double t);

}  // namespace crw
