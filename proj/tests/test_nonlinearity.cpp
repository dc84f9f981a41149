#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "fanstate/nonlinearity.hpp"

using namespace fanstate;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Explicit low-degree generalized Laguerre polynomials.
double laguerre_explicit(int alpha, int degree, double x) {
    const double a = alpha;
    switch (degree) {
        case 0: return 1.0;
        case 1: return 1.0 + a - x;
        case 2: return (a + 1) * (a + 2) / 2.0 - (a + 2) * x + x * x / 2.0;
        case 3:
            return (a + 1) * (a + 2) * (a + 3) / 6.0 - (a + 2) * (a + 3) * x / 2.0 +
                   (a + 3) * x * x / 2.0 - x * x * x / 6.0;
    }
    throw std::invalid_argument("degree");
}

double binomial(int n, int r) {
    double b = 1.0;
    for (int i = 1; i <= r; ++i) b = b * (n - r + i) / i;
    return b;
}

}  // namespace

TEST_CASE("laguerre matches worked values", "[laguerre]") {
    CHECK(laguerre(0, 0, 5.0) == 1.0);
    CHECK_THAT(laguerre(2, 1, 0.05), WithinAbs(2.95, 1e-15));
    CHECK_THAT(laguerre(0, 2, 0.05), WithinAbs(0.90125, 1e-15));
    CHECK_THAT(laguerre(4, 2, 0.05), WithinAbs(14.70125, 1e-13));
}

TEST_CASE("laguerre recurrence agrees with explicit polynomials", "[laguerre]") {
    for (int alpha : {0, 2, 4})
        for (int degree = 0; degree <= 3; ++degree)
            for (double x : {0.0, 0.05, 0.3, 1.0, 2.5, 7.0})
                CHECK_THAT(laguerre(alpha, degree, x), WithinAbs(laguerre_explicit(alpha, degree, x), 1e-12));
}

TEST_CASE("unity model is identically one", "[f]") {
    const NonlinearityModel unity = model::Unity{};
    CHECK(f_value(unity, 17, 3) == 1.0);
    for (int n = 0; n < 50; ++n) CHECK(f_value(unity, n, 2) == 1.0);
    CHECK(f_superfactorial(unity, 12, 2) == 1.0);
}

TEST_CASE("ion-trap f values", "[f][iontrap]") {
    const NonlinearityModel ion = model::IonTrap{0.05};
    CHECK_THAT(f_value(ion, 2, 1), WithinAbs(0.5, 1e-15));
    // 2 L^2_2(0.05) / (24 L^0_2(0.05)) = 2 * 5.80125 / (24 * 0.90125)
    CHECK_THAT(f_value(ion, 4, 1), WithinAbs(0.536407766990291262, 1e-14));
    CHECK(f_value(ion, 0, 1) == 1.0);
    CHECK(f_value(ion, 3, 2) == 1.0);
}

TEST_CASE("super-factorial worked values", "[superfactorial]") {
    const NonlinearityModel ion = model::IonTrap{0.05};
    CHECK(f_superfactorial(ion, 1, 1) == 1.0);
    CHECK(f_superfactorial(model::QDeformed{0.4}, 1, 1) == 1.0);
    CHECK_THAT(f_superfactorial(ion, 4, 1), WithinAbs(0.268203883495145631, 1e-14));
}

TEST_CASE("super-factorial telescopes", "[superfactorial][property]") {
    const std::vector<NonlinearityModel> models{model::Unity{}, model::IonTrap{0.05},
                                                model::QDeformed{0.3}, model::PhotonAdded{2}};
    for (const auto& m : models) {
        for (int k : {1, 2, 3}) {
            SuperFactorialTable table(m, k);
            for (long p = 2 * k; p <= 60; ++p) {
                const double lhs = table.at(p);
                const double rhs = f_value(m, p, k) * table.at(p - 2 * k);
                CHECK_THAT(lhs, WithinRel(rhs, 1e-13));
            }
        }
    }
}

TEST_CASE("ion-trap f approaches its eta -> 0 limit", "[f][iontrap][property]") {
    const NonlinearityModel ion = model::IonTrap::from_eta(1e-6);
    for (int k : {1, 2}) {
        for (long n = 2 * k; n <= 30; ++n) {
            // (n-2k)! L^{2k}_{n-2k}(0) / n! with L^{2k}_j(0) = C(j+2k, j)
            double limit = binomial(static_cast<int>(n), static_cast<int>(n - 2 * k));
            for (long j = n - 2 * k + 1; j <= n; ++j) limit /= static_cast<double>(j);
            CHECK_THAT(f_value(ion, n, k), WithinAbs(limit, 1e-6));
        }
    }
}

TEST_CASE("ion-trap f surfaces Laguerre zeros", "[f][iontrap][errors]") {
    // L^0_1(1) = 0 exactly
    const NonlinearityModel ion = model::IonTrap{1.0};
    try {
        f_value(ion, 3, 1);
        FAIL("expected laguerre-zero");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::laguerre_zero);
        CHECK(e.is_singularity());
    }
    SuperFactorialTable table(ion, 1);
    CHECK_THROWS_AS(table.at(3), Error);
}

TEST_CASE("q-deformed f", "[f]") {
    const NonlinearityModel q = model::QDeformed{0.5};
    CHECK(f_value(q, 0, 1) == 1.0);
    CHECK_THAT(f_value(q, 1, 1), WithinAbs(1.0, 1e-15));
    CHECK_THAT(f_value(q, 3, 1), WithinRel(std::sqrt(std::sinh(1.5) / (3.0 * std::sinh(0.5))), 1e-14));
    CHECK(f_value(model::QDeformed{0.0}, 7, 1) == 1.0);
    CHECK_THAT(f_value(model::QDeformed{-0.5}, 3, 1), WithinRel(f_value(q, 3, 1), 1e-14));
    // sinh(1200) overflows a double, f(1200) itself does not
    const double big = f_value(model::QDeformed{1.0}, 1200, 1);
    REQUIRE(std::isfinite(big));
    CHECK_THAT(std::log(big), WithinRel(0.5 * (1200.0 - std::log(2.0) - std::log(1200.0) - std::log(std::sinh(1.0))), 1e-13));
}

TEST_CASE("photon-added f and its singular chain", "[f][errors]") {
    const NonlinearityModel pa = model::PhotonAdded{3};
    CHECK_THAT(f_value(pa, 5, 1), WithinAbs(0.5, 1e-15));
    CHECK(f_value(pa, 2, 1) == 0.0);
    try {
        f_superfactorial(pa, 4, 1);
        FAIL("expected nonlinearity-singular");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::nonlinearity_singular);
    }
}

TEST_CASE("invalid models are rejected", "[errors]") {
    CHECK_THROWS_AS(SuperFactorialTable(model::IonTrap{0.0}, 1), Error);
    CHECK_THROWS_AS(SuperFactorialTable(model::PhotonAdded{0}, 1), Error);
    CHECK_THROWS_AS(SuperFactorialTable(model::Unity{}, 0), Error);
}

TEST_CASE("drive parameters fix |xi|", "[drive]") {
    CHECK_THAT(xi_from_drive({0.3, 0.09, 1.0, 0.0, 0.0, 1}).magnitude, WithinAbs(1.0, 1e-14));
    CHECK_THAT(xi_from_drive({0.3, 0.36, 1.0, 0.0, 0.0, 1}).magnitude, WithinAbs(2.0, 1e-14));
    CHECK_THAT(xi_from_drive({0.5, 0.0625, 1.0, 0.0, 0.0, 2}).magnitude, WithinAbs(1.0, 1e-14));
}

TEST_CASE("drive root solves the defining relation", "[drive][property]") {
    for (int k : {1, 2, 3}) {
        for (double phase : {-2.0, 0.0, 0.7, 3.0}) {
            const IonTrapDrive d{0.2, 0.01, 0.5, 0.3, 0.3 + phase, k};
            const auto r = xi_from_drive(d);
            const std::complex<double> i_eta{0.0, d.eta};
            const auto expected = -std::polar(1.0, d.phi1 - d.phi0) * d.omega0 / (std::pow(i_eta, 2 * k) * d.omega1);
            const auto got = std::pow(r.xi, 2 * k);
            CHECK(std::abs(got - expected) <= 1e-10 * std::abs(expected));
            const auto rotated = r.xi * std::polar(1.0, r.rotation);
            CHECK_THAT(rotated.imag(), WithinAbs(0.0, 1e-12));
            CHECK(rotated.real() > 0.0);
        }
    }
}

TEST_CASE("|xi| is invariant under common Rabi scaling", "[drive][property]") {
    const auto base = xi_from_drive({0.3, 0.2, 0.7, 0.0, 1.0, 2});
    for (double s : {1e-3, 0.5, 7.0, 1e4}) {
        const auto scaled = xi_from_drive({0.3, 0.2 * s, 0.7 * s, 0.0, 1.0, 2});
        CHECK_THAT(scaled.magnitude, WithinRel(base.magnitude, 1e-14));
    }
    CHECK_THROWS_AS(xi_from_drive({0.0, 1.0, 1.0, 0.0, 0.0, 1}), Error);
}
