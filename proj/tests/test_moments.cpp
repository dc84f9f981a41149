#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "fanstate/moments.hpp"

using namespace fanstate;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// J_k(m) as the literal sum of exp(i pi n m).
double j_k_direct(int k, long m) {
    std::complex<double> s = 0.0;
    for (int n = 0; n < 2 * k; ++n) s += std::polar(1.0, std::numbers::pi * n * static_cast<double>(m));
    return s.real();
}

FanStateSpec unity(int k, double xi) { return {k, xi, 0.0, model::Unity{}}; }

}  // namespace

TEST_CASE("J_k worked values", "[jk]") {
    CHECK(j_k(1, 2) == 2.0);
    CHECK(j_k(2, 3) == 0.0);
    CHECK(j_k(3, 0) == 6.0);
    CHECK(j_k(2, -3) == 0.0);
}

TEST_CASE("J_k product property holds exhaustively", "[jk][property]") {
    for (int k = 1; k <= 5; ++k) {
        for (long n = -50; n <= 50; ++n) {
            CHECK_THAT(j_k(k, n), WithinAbs(j_k_direct(k, n), 1e-12));
            for (long shift = -10; shift <= 10; ++shift) {
                const double expected = (shift % 2 == 0) ? 2.0 * k * k * (1 + (n % 2 == 0 ? 1 : -1)) : 0.0;
                CHECK(j_k(k, n) * j_k(k, n + shift) == expected);
                CHECK(j_k(k, n) * j_k(k, n - shift) == expected);
            }
        }
    }
}

TEST_CASE("normalization worked values", "[normalization]") {
    CHECK(normalization_dk(unity(1, 0.0)).value == 4.0);
    CHECK(normalization_dk(unity(3, 0.0)).value == 36.0);

    const double x = 0.64;
    CHECK_THAT(normalization_dk(unity(1, 0.8)).value, WithinRel(2.0 * (std::cosh(x) + std::cos(x)), 1e-14));

    const double y = 1.5625;
    const double r = y / std::sqrt(2.0);
    const double d2 = 4.0 * (std::cosh(y) + std::cos(y) + 2.0 * std::cosh(r) * std::cos(r));
    CHECK_THAT(normalization_dk(unity(2, 1.25)).value, WithinRel(d2, 1e-14));
}

TEST_CASE("general moment worked values", "[moment]") {
    const auto s = unity(1, 0.8);
    const double x = 0.64;
    const double d1 = 2.0 * (std::cosh(x) + std::cos(x));

    CHECK_THAT(moment_general(s, 0, 4).value, WithinAbs(0.4096, 1e-13));
    CHECK(moment_general(s, 0, 2).value == 0.0);
    CHECK(moment_general(unity(1, 1.7), 0, 2).value == 0.0);
    CHECK(moment_general(s, 0, 3).value == 0.0);

    const auto n = moment_general(s, 1, 1);
    CHECK_THAT(n.value, WithinRel(2.0 * x * (std::sinh(x) - std::sin(x)) / d1, 1e-13));
    CHECK_THAT(n.value, WithinAbs(0.0277734417869844837, 1e-15));
    CHECK(n.converged);
    CHECK(n.last_term_ratio <= SeriesControl{}.rel_tol);
    CHECK(n.terms_used >= SeriesControl{}.consecutive_small);

    CHECK_THAT(moment_general(s, 2, 2).value, WithinAbs(0.0833425104904849360, 1e-15));
}

TEST_CASE("ion-trap moments match high-precision brute force", "[moment][iontrap]") {
    // 30-digit truncated Fock sums, eta^2 = 0.05, k = 1, xi = 0.8
    const FanStateSpec s{1, 0.8, 0.0, model::IonTrap{0.05}};
    MomentEngine engine(s);
    CHECK_THAT(engine.moment(1, 1).value, WithinRel(0.354802306631278470, 1e-13));
    CHECK_THAT(engine.moment(0, 4).value, WithinRel(1.49160600159965533, 1e-13));
    CHECK_THAT(engine.moment(4, 0).value, WithinRel(1.49160600159965533, 1e-13));
    CHECK_THAT(engine.moment(2, 2).value, WithinRel(1.06654580477288650, 1e-13));
}

TEST_CASE("unity fast paths", "[fastpath]") {
    const auto s = unity(1, 0.8);
    const double x = 0.64;
    const double d1 = 2.0 * (std::cosh(x) + std::cos(x));
    CHECK_THAT(moment_unity_fastpath(s, UnityMoment::adagN_aN, 2).value,
               WithinRel(2.0 * x * x * (std::cosh(x) - std::cos(x)) / d1, 1e-13));
    CHECK(moment_unity_fastpath(s, UnityMoment::aN, 2).value == 0.0);
    CHECK_THAT(moment_unity_fastpath(s, UnityMoment::a2N, 2).value, WithinAbs(0.4096, 1e-13));
    CHECK_THROWS_AS(moment_unity_fastpath({1, 0.8, 0.0, model::IonTrap{0.05}}, UnityMoment::aN, 2), Error);
}

TEST_CASE("fast paths equal the general series", "[fastpath][property]") {
    for (int k : {1, 2, 3}) {
        for (double xi : {0.1, 0.5, 0.8, 1.25, 2.0, 3.0}) {
            MomentEngine engine(unity(k, xi));
            for (int n = 1; n <= 6 * k; ++n) {
                const double an = engine.moment(0, n).value;
                const double a2n = engine.moment(0, 2 * n).value;
                const double nn = engine.moment(n, n).value;
                const auto s = unity(k, xi);
                CHECK_THAT(moment_unity_fastpath(s, UnityMoment::aN, n).value, WithinAbs(an, 1e-12 * (1 + std::fabs(an))));
                CHECK_THAT(moment_unity_fastpath(s, UnityMoment::a2N, n).value, WithinAbs(a2n, 1e-12 * (1 + std::fabs(a2n))));
                CHECK_THAT(moment_unity_fastpath(s, UnityMoment::adagN_aN, n).value, WithinAbs(nn, 1e-12 * (1 + nn)));
            }
        }
    }
}

TEST_CASE("parity theorem: inadmissible powers have vanishing phase moments", "[moment][property]") {
    const std::vector<NonlinearityModel> models{model::Unity{}, model::IonTrap{0.05}, model::QDeformed{0.2}};
    for (const auto& m : models) {
        for (int k = 1; k <= 3; ++k) {
            MomentEngine engine({k, 0.9, 0.0, m});
            for (int n = 1; n <= 6 * k; ++n) {
                if (n % (2 * k) != 0) {
                    CHECK(engine.moment(0, n).value == 0.0);
                    CHECK(engine.moment(0, 2 * n).value == 0.0);
                } else if ((n / (2 * k)) % 2 == 1) {
                    CHECK(engine.moment(0, n).value == 0.0);
                }
            }
        }
    }
}

TEST_CASE("positivity and hermiticity", "[moment][property]") {
    auto xi = GENERATE(take(20, random(0.0, 2.5)));
    auto k = GENERATE(1, 2);
    MomentEngine engine({k, xi, 0.0, model::IonTrap{0.05}});
    CHECK(engine.normalization().value > 0.0);
    for (int l = 0; l <= 8; ++l) {
        CHECK(engine.moment(l, l).value >= 0.0);
        for (int m = 0; m <= 8; ++m) {
            const double a = engine.moment(l, m).value;
            const double b = engine.moment(m, l).value;
            CHECK_THAT(a, WithinAbs(b, 1e-12 * (1 + std::fabs(a))));
        }
    }
}

TEST_CASE("moments vanish as xi -> 0", "[moment][property]") {
    for (int m = 1; m <= 8; ++m) {
        double previous = std::numeric_limits<double>::infinity();
        for (double xi : {1e-1, 1e-2, 1e-3}) {
            const double v = std::fabs(moment_general(unity(1, xi), m, m).value);
            CHECK(v < previous);
            previous = v;
        }
        CHECK(previous < 1e-5);
        CHECK(moment_general(unity(1, 0.0), m, m).value == 0.0);
    }
    CHECK(moment_general(unity(2, 0.0), 0, 0).value == 1.0);
}

TEST_CASE("complex amplitudes reduce to their modulus", "[moment]") {
    const auto s = FanStateSpec::from_complex(1, std::polar(0.8, 0.4), model::Unity{});
    CHECK_THAT(s.xi, WithinAbs(0.8, 1e-15));
    CHECK_THAT(s.rotation(), WithinAbs(-0.4, 1e-15));
    CHECK_THAT(moment_general(s, 0, 4).value, WithinAbs(0.4096, 1e-13));
}

TEST_CASE("series errors", "[moment][errors]") {
    SeriesControl tight{4, 1e-15, 3};
    try {
        moment_general(unity(1, 3.0), 1, 1, tight);
        FAIL("expected non-convergence");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::non_convergence);
    }
    CHECK_THROWS_AS(moment_general(unity(1, 0.5), 1, 1, SeriesControl{2, 1e-15, 3}), Error);
    CHECK_THROWS_AS(moment_general(unity(1, 0.5), 1, 1, SeriesControl{20, 1.5, 3}), Error);
    CHECK_THROWS_AS(moment_general(unity(1, -0.5), 1, 1), Error);
    CHECK_THROWS_AS(moment_general(unity(0, 0.5), 1, 1), Error);
    CHECK_THROWS_AS(moment_general({1, 0.5, 0.0, model::PhotonAdded{3}}, 1, 1), Error);
}
