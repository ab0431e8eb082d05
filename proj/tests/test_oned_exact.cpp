#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "crw/oned_exact.hpp"
#include "crw/oracles.hpp"
#include "doctest.h"

using namespace crw;

namespace {

SkewMatrix random_skew(int n, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SkewMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) m.set(i, j, u(gen));
    return m;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("phi is the error-function integral") {
    CHECK(phi(0.0) == 0.0);
    for (double x : {0.5, 1.0, 2.0}) CHECK(phi(-x) == -phi(x));
    const double quad = oracle::adaptive_simpson(
        [](double s) { return 2.0 / std::sqrt(std::numbers::pi) * std::exp(-s * s); }, 0.0, 1.0, 1e-14);
    CHECK(std::abs(phi(1.0) - quad) <= 1e-12);
    CHECK(std::abs(phi(1.0) - 0.8427008) <= 1e-7);
    CHECK(phi(40.0) == 1.0);
}

TEST_CASE("skew matrices") {
    SkewMatrix m(4);
    m.set(0, 2, 1.5);
    CHECK(m(0, 2) == 1.5);
    CHECK(m(2, 0) == -1.5);
    CHECK(m(1, 1) == 0.0);
    CHECK_THROWS_AS(m.set(1, 1, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(SkewMatrix(-1), std::invalid_argument);
}

TEST_CASE("small Pfaffians by definition") {
    SkewMatrix two(2);
    two.set(0, 1, 0.37);
    CHECK(pfaffian(two) == 0.37);
    const double a = 1.1, b = -0.4, c = 2.3, d = 0.7, e = -1.9, f = 0.25;
    SkewMatrix four(4);
    four.set(0, 1, a);
    four.set(0, 2, b);
    four.set(0, 3, c);
    four.set(1, 2, d);
    four.set(1, 3, e);
    four.set(2, 3, f);
    CHECK(pfaffian(four) == doctest::Approx(a * f - b * e + c * d).epsilon(1e-15));
    CHECK(pfaffian_elimination(four) == doctest::Approx(a * f - b * e + c * d).epsilon(1e-13));
    CHECK(pfaffian(SkewMatrix(0)) == 1.0);
    CHECK_THROWS_AS(pfaffian(SkewMatrix(3)), std::invalid_argument);
    CHECK_THROWS_AS(pfaffian_elimination(SkewMatrix(5)), std::invalid_argument);
}

TEST_CASE("Pfaffian squared equals the determinant") {
    std::mt19937_64 gen(12345);
    for (int n : {2, 4, 6, 8}) {
        for (int rep = 0; rep < 25; ++rep) {
            const auto m = random_skew(n, gen);
            const double pf = pfaffian(m);
            const double det = oracle::eigen_determinant(m.entries(), n);
            CHECK(rel(pf * pf, det) <= 1e-9);
            CHECK(rel(determinant(m.entries(), n), det) <= 1e-10);
            CHECK(rel(pfaffian_elimination(m), pf) <= 1e-10);
        }
    }
    for (int n : {10, 16, 24}) {
        const auto m = random_skew(n, gen);
        const double pf = pfaffian(m);
        CHECK(rel(pf * pf, oracle::eigen_determinant(m.entries(), n)) <= 1e-9);
    }
}

TEST_CASE("row swap flips the Pfaffian sign") {
    std::mt19937_64 gen(3);
    const auto m = random_skew(6, gen);
    SkewMatrix p(6);
    const int perm[6] = {1, 0, 2, 3, 4, 5};
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) p.set(i, j, m(perm[i], perm[j]));
    CHECK(pfaffian(p) == doctest::Approx(-pfaffian(m)).epsilon(1e-12));
}

TEST_CASE("two-motion non-collision is phi of the scaled gap") {
    CHECK(pnc_pfaffian_1d(OrderedStarts1D({0.0, 2.0}), 1.0) == doctest::Approx(phi(1.0)).epsilon(1e-15));
    for (double gap : {0.1, 1.0, 3.7})
        for (double t : {0.01, 1.0, 250.0})
            CHECK(std::abs(pnc_pfaffian_1d(OrderedStarts1D({-1.0, -1.0 + gap}), t) - phi(gap / std::sqrt(4 * t))) <=
                  1e-12);
}

TEST_CASE("ordered starts") {
    CHECK_THROWS_AS(OrderedStarts1D({0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(OrderedStarts1D({1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(pnc_pfaffian_1d(OrderedStarts1D({0.0, 1.0, 2.0}), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(pnc_pfaffian_1d(OrderedStarts1D({0.0, 1.0}), 0.0), std::invalid_argument);
    const std::vector<double> tied{0.0, 1.0, 1.0, 3.0};
    CHECK(pnc_pfaffian_1d_closure(tied, 2.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(std::abs(pnc_pfaffian_1d_closure(std::vector<double>{0.5, 0.5}, 1.0)) <= 1e-15);
}

TEST_CASE("Karlin-McGregor density") {
    const OrderedStarts1D one({0.3});
    CHECK(km_density(one, std::vector<double>{1.2}, 2.0) == gaussian_kernel(0.3, 1.2, 2.0));
    CHECK(gaussian_kernel(0.0, 0.0, 1.0) == doctest::Approx(1.0 / std::sqrt(2 * std::numbers::pi)));
    const OrderedStarts1D three({0.0, 1.0, 2.5});
    CHECK(km_density(three, std::vector<double>{-0.5, 0.7, 0.7}, 1.3) == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS_AS(km_density(three, std::vector<double>{0.0, 1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("integrated Karlin-McGregor density equals the Pfaffian") {
    const std::vector<double> two{0.0, 2.0};
    const double i2 = oracle::ordered_km_integral(two, 1.0);
    CHECK(std::abs(i2 - phi(1.0)) <= 1e-4);
    CHECK(std::abs(i2 - pnc_pfaffian_1d(OrderedStarts1D(two), 1.0)) <= 1e-4);
    const std::vector<double> four{0.0, 1.0, 2.0, 3.0};
    CHECK(std::abs(oracle::ordered_km_integral(four, 1.0) - pnc_pfaffian_1d(OrderedStarts1D(four), 1.0)) <= 1e-4);
    const std::vector<double> uneven{-1.0, 0.5, 0.9, 2.0};
    CHECK(std::abs(oracle::ordered_km_integral(uneven, 0.6) - pnc_pfaffian_1d(OrderedStarts1D(uneven), 0.6)) <=
          1e-4);
}

TEST_CASE("four-motion Pfaffian matches Brownian simulation") {
    const std::vector<double> starts{0.0, 1.0, 2.0, 3.0};
    const double exact = pnc_pfaffian_1d(OrderedStarts1D(starts), 1.0);
    CHECK(exact == doctest::Approx(0.06363310706).epsilon(1e-9));
    const auto mc = oracle::brownian_pnc_mc(starts, 1.0, 100000, 200, 99, 1);
    CHECK(std::abs(mc.mean[0] - exact) <= 3.0 * mc.stderr_at(0));
}

TEST_CASE("range, monotonicity and scaling") {
    const std::vector<double> xs{-2.0, 0.0, 0.5, 3.0, 4.0, 7.5};
    const OrderedStarts1D s(xs);
    double prev = 1.0;
    for (double t : {0.01, 0.1, 1.0, 10.0, 100.0, 1e4}) {
        const double v = pnc_pfaffian_1d(s, t);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(v <= prev);
        prev = v;
    }
    double last = 0.0;
    for (double lam : {0.5, 1.0, 1.5, 3.0}) {
        std::vector<double> dil;
        for (double x : xs) dil.push_back(lam * x);
        const double v = pnc_pfaffian_1d(OrderedStarts1D(dil), 2.0);
        CHECK(v >= last);
        last = v;
    }
    // Only x_ij / sqrt(t) enters, so powers of two scale without rounding.
    for (double lam : {0.5, 2.0, 8.0}) {
        std::vector<double> dil;
        for (double x : xs) dil.push_back(lam * x);
        CHECK(pnc_pfaffian_1d(OrderedStarts1D(dil), lam * lam * 3.0) == pnc_pfaffian_1d(s, 3.0));
    }
}

TEST_CASE("Vandermonde asymptotics") {
    CHECK(vandermonde(std::vector<double>{0.0, 1.0, 2.0, 3.0}) == 12.0);
    CHECK(vandermonde_asymptotic(std::vector<double>{0.0, 1.0, 1.0, 3.0}, 5.0, 2.0) == 0.0);
    CHECK(vandermonde_asymptotic(std::vector<double>{0.0, 2.0}, 4.0, 1.0) == 1.0);

    // N = 2: phi(d / sqrt(4t)) ~ d / sqrt(pi t).
    const double c2 = 1.0 / std::sqrt(std::numbers::pi);
    for (double t : {1e2, 1e4, 1e6}) {
        const double exact = pnc_pfaffian_1d(OrderedStarts1D({0.0, 1.0}), t);
        const double approx = vandermonde_asymptotic(std::vector<double>{0.0, 1.0}, t, c2);
        CHECK(std::abs(exact / approx - 1) <= 1.0 / t);
    }

    const OrderedStarts1D four({0.0, 1.0, 2.0, 3.0});
    const double c4_mid = vandermonde_ratio(four, 1e4);
    const double c4 = vandermonde_ratio(four, 1e6);
    CHECK(std::abs(c4_mid / c4 - 1) <= 0.01);
    CHECK(c4 > 0.0);
    const double at_large = pnc_pfaffian_1d(four, 1e8) / vandermonde_asymptotic(four.xs(), 1e8, c4);
    CHECK(std::abs(at_large - 1) <= 1e-3);
}

TEST_CASE("Pfaffian agrees with 60-digit reference values across the series switch") {
    struct Ref {
        std::vector<double> xs;
        double t;
        double value;
        double tol;
    };
    // Direct Pfaffian evaluated offline in 60-digit arithmetic.
    const std::vector<Ref> refs{
        {{0, 1, 2, 3}, 1.0, 0.063633107060272827, 1e-12},
        {{0, 1, 2, 3}, 4.0, 0.0019472201952933232, 1e-12},
        {{0, 1, 2, 3}, 100.0, 1.5757270310867964e-7, 1e-10},
        {{0, 1, 2, 3}, 1e4, 1.5913902853258039e-13, 1e-10},
        {{0, 1, 2, 3}, 1e6, 1.5915478393704575e-19, 1e-10},
        {{0, 1, 2, 3}, 1e8, 1.5915494150034591e-25, 1e-10},
        {{-2, 0, 0.5, 3, 4, 7.5}, 10.0, 2.3574281832278937e-6, 1e-9},
        {{-2, 0, 0.5, 3, 4, 7.5}, 1e4, 2.4079264219085631e-28, 1e-8},
        {{0, 1, 2, 3, 4, 5, 6, 7}, 20.0, 3.285588639882606e-19, 1e-6},
        {{0, 1, 2, 3, 4, 5, 6, 7}, 1e3, 8.4695696349244852e-43, 1e-6},
    };
    for (const auto& r : refs) {
        INFO("N = " << r.xs.size() << ", t = " << r.t);
        CHECK(rel(pnc_pfaffian_1d(OrderedStarts1D(r.xs), r.t), r.value) <= r.tol);
    }
    // Just either side of the switch point u = 1 for (0,1,2,3): t = 2.25.
    const OrderedStarts1D four({0.0, 1.0, 2.0, 3.0});
    const double below = pnc_pfaffian_1d(four, 2.25 * (1 - 1e-12));
    const double above = pnc_pfaffian_1d(four, 2.25 * (1 + 1e-12));
    CHECK(rel(below, above) <= 1e-10);
    CHECK(vandermonde_ratio(four, 1e8) == doctest::Approx(1.0 / (24.0 * std::numbers::pi)).epsilon(1e-7));
}
