#pragma once

#include <cmath>
#include <numbers>

// Closed-form squeezing degree for f = 1, written in x = xi^2.
//
// Convention: inside these expressions D1(x) = cosh x + cos x, which is half
// of the normalization D_1 used by the series engine, and D2(x) is a quarter
// of D_2. Only ratios of these appear, so the physics is unchanged.

namespace fanstate::closed_form {

enum class Variant { k1n2, k2n4 };

inline double d1(double x) { return std::cosh(x) + std::cos(x); }

/// S for k = 1, N = 2.
inline double s_k1n2(double x, double phi) {
    const double num = std::cosh(x) - std::cos(x) + d1(x) * std::cos(4.0 * phi);
    const double den = 2.0 * x * (std::sinh(x) - std::sin(x)) + d1(x);
    return x * x * num / den;
}

/// Squeezing for k = 1, N = 2 iff cos(4 phi) < h(x).
inline double h(double x) { return (std::cos(x) - std::cosh(x)) / d1(x); }

namespace k2n4 {

inline double d2(double x) {
    const double y = x / std::numbers::sqrt2;
    return std::cosh(x) + std::cos(x) + 2.0 * std::cosh(y) * std::cos(y);
}

inline double a(double x) {
    const double y = x / std::numbers::sqrt2;
    return 2.0 * std::pow(x, 3) *
           (std::sinh(x) + std::sin(x) -
            std::numbers::sqrt2 * (std::sinh(y) * std::cos(y) + std::sin(y) * std::cosh(y)));
}

inline double c(double x) {
    const double y = x / std::numbers::sqrt2;
    return x * (std::sinh(x) - std::sin(x) +
                std::numbers::sqrt2 * (std::sinh(y) * std::cos(y) - std::sin(y) * std::cosh(y)));
}

inline double cubic_bracket(double x) {
    const double y = x / std::numbers::sqrt2;
    return 3.0 * x * x * (std::cosh(x) - std::cos(x) - 2.0 * std::sinh(y) * std::sin(y));
}

inline double b(double x) { return cubic_bracket(x) + 6.0 * c(x) + 2.0 * d2(x); }

}  // namespace k2n4

/// S for k = 2, N = 4.
inline double s_k2n4(double x, double phi) {
    using namespace k2n4;
    const double y = x / std::numbers::sqrt2;
    const double num = std::cosh(x) + std::cos(x) - 2.0 * std::cosh(y) * std::cos(y) +
                       d2(x) * std::cos(8.0 * phi);
    const double den = cubic_bracket(x) + a(x) + 2.0 * b(x) - d2(x);
    return std::pow(x, 4) / 4.0 * num / den;
}

inline double s(Variant v, double x, double phi) {
    return v == Variant::k1n2 ? s_k1n2(x, phi) : s_k2n4(x, phi);
}

}  // namespace fanstate::closed_form
