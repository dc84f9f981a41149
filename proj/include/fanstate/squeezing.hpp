#pragma once

#include <cmath>
#include <numbers>
#include <string_view>
#include <vector>

#include "fanstate/error.hpp"
#include "fanstate/moments.hpp"

namespace fanstate {

struct QuadratureSpec {
    int n_power = 1;  // N in Q_N(phi)
    double phi = 0.0;

    void validate() const {
        if (n_power < 1) throw Error(ErrorCode::invalid_argument, "power N must be >= 1");
        if (!std::isfinite(phi)) throw Error(ErrorCode::invalid_argument, "phi must be finite");
    }
};

enum class DirectionFamily { phi1, phi2, none };

constexpr std::string_view to_string(DirectionFamily f) noexcept {
    switch (f) {
        case DirectionFamily::phi1: return "phi1-family";
        case DirectionFamily::phi2: return "phi2-family";
        case DirectionFamily::none: return "none";
    }
    return "none";
}

/// The four expectation values S(phi) is built from, for one (state, N).
struct SqueezingMoments {
    int k = 1;
    int n_power = 1;
    double xi = 0.0;
    double a_n = 0.0;        // <a^N>
    double a_2n = 0.0;       // <a^{2N}>
    double adag_n_a_n = 0.0; // <a^dag^N a^N>
    double f_n = 0.0;        // <[a^N, a^dag^N]>

    bool admissible() const { return n_power % (2 * k) == 0; }

    /// Coefficient of cos(2 N phi) in the numerator of S.
    double phase_coefficient() const { return a_2n - a_n * a_n; }

    double s_at(double phi) const {
        if (xi == 0.0) return 0.0;
        return 2.0 * (adag_n_a_n - a_n * a_n + std::cos(2.0 * n_power * phi) * phase_coefficient()) / f_n;
    }

    /// min over phi of S; S is affine in cos(2 N phi), so the minimum sits at cos = -+1.
    double s_min() const {
        if (xi == 0.0) return 0.0;
        return 2.0 * (adag_n_a_n - a_n * a_n - std::fabs(phase_coefficient())) / f_n;
    }
};

struct SqueezingReport {
    int n_power = 1;
    double phi = 0.0;
    double s_value = 0.0;
    double variance = 0.0;  // <(Delta Q_N(phi))^2>
    double f_n = 0.0;
    double circle = 0.0;    // f_n / 4, the coherent-state reference
    bool squeezed = false;
    bool admissible_power = false;
    std::vector<double> direction_set;
    DirectionFamily classification = DirectionFamily::none;
};

/// N! N^(q) / ((N-q)! q!) for q = 1..N.
inline std::vector<double> commutator_coefficients(int n_power) {
    std::vector<double> coeffs;
    double binom = 1.0;
    double falling = 1.0;
    for (int q = 1; q <= n_power; ++q) {
        binom = binom * (n_power - q + 1) / q;
        falling *= (n_power - q + 1);
        coeffs.push_back(binom * falling);
    }
    return coeffs;
}

inline double f_n_expectation(MomentEngine& engine, int n_power) {
    if (n_power < 1) throw Error(ErrorCode::invalid_argument, "power N must be >= 1");
    const auto coeffs = commutator_coefficients(n_power);
    double total = 0.0;
    for (int q = 1; q <= n_power; ++q)
        total += coeffs[q - 1] * engine.moment(n_power - q, n_power - q).value;
    return total;
}

inline double f_n_expectation(const FanStateSpec& spec, int n_power, const SeriesControl& ctrl = {}) {
    MomentEngine engine(spec, ctrl);
    return f_n_expectation(engine, n_power);
}

inline SqueezingMoments squeezing_moments(MomentEngine& engine, int n_power) {
    if (n_power < 1) throw Error(ErrorCode::invalid_argument, "power N must be >= 1");
    SqueezingMoments sm;
    sm.k = engine.spec().k;
    sm.n_power = n_power;
    sm.xi = engine.spec().xi;
    sm.a_n = engine.moment(0, n_power).value;
    sm.a_2n = engine.moment(0, 2 * n_power).value;
    sm.adag_n_a_n = engine.moment(n_power, n_power).value;
    sm.f_n = f_n_expectation(engine, n_power);
    return sm;
}

inline SqueezingMoments squeezing_moments(const FanStateSpec& spec, int n_power,
                                          const SeriesControl& ctrl = {}) {
    MomentEngine engine(spec, ctrl);
    return squeezing_moments(engine, n_power);
}

/// phi_j = (2j+1) pi / (4k) and phi_j = pi j / (2k), j = 0..2k-1.
struct DirectionSets {
    std::vector<double> phi1;
    std::vector<double> phi2;
};

inline DirectionSets direction_sets(int k) {
    if (k < 1) throw Error(ErrorCode::invalid_argument, "fan order k must be >= 1");
    DirectionSets sets;
    for (int j = 0; j < 2 * k; ++j) {
        sets.phi1.push_back((2 * j + 1) * std::numbers::pi / (4.0 * k));
        sets.phi2.push_back(j * std::numbers::pi / (2.0 * k));
    }
    return sets;
}

/// Angles in [0, pi) where S attains its minimum. Empty when S does not
/// depend on phi.
inline std::vector<double> minimizing_angles(const SqueezingMoments& sm) {
    std::vector<double> out;
    const double c = sm.phase_coefficient();
    if (sm.xi == 0.0 || c == 0.0) return out;
    const double n = sm.n_power;
    // c > 0: cos(2N phi) = -1; c < 0: cos(2N phi) = +1
    const double offset = c > 0.0 ? 0.5 : 0.0;
    for (int j = 0; j < sm.n_power; ++j) out.push_back((j + offset) * std::numbers::pi / n);
    return out;
}

/// phi1-family when <a^{2N}> > max(<a^N>^2, <a^dag^N a^N>),
/// phi2-family when <a^{2N}> < min(<a^N>^2, 2<a^N>^2 - <a^dag^N a^N>).
inline DirectionFamily classify(const SqueezingMoments& sm) {
    if (sm.xi == 0.0) return DirectionFamily::none;
    const double an_sq = sm.a_n * sm.a_n;
    if (sm.a_2n > std::max(an_sq, sm.adag_n_a_n)) return DirectionFamily::phi1;
    if (sm.a_2n < std::min(an_sq, 2.0 * an_sq - sm.adag_n_a_n)) return DirectionFamily::phi2;
    return DirectionFamily::none;
}

inline DirectionFamily classify_directions(const FanStateSpec& spec, int n_power,
                                           const SeriesControl& ctrl = {}) {
    if (n_power < 1 || n_power % (2 * spec.k) != 0)
        throw Error(ErrorCode::invalid_argument, "direction classes need N to be a multiple of 2k");
    return classify(squeezing_moments(spec, n_power, ctrl));
}

inline SqueezingReport make_report(const SqueezingMoments& sm, double phi) {
    SqueezingReport r;
    r.n_power = sm.n_power;
    r.phi = phi;
    r.f_n = sm.f_n;
    r.circle = sm.f_n / 4.0;
    r.s_value = sm.s_at(phi);
    r.variance = r.circle * (1.0 + r.s_value);
    r.squeezed = r.s_value < 0.0;
    r.admissible_power = sm.admissible();
    r.direction_set = minimizing_angles(sm);
    r.classification = r.admissible_power ? classify(sm) : DirectionFamily::none;
    return r;
}

inline SqueezingReport squeezing_degree(const FanStateSpec& spec, const QuadratureSpec& quad,
                                        const SeriesControl& ctrl = {}) {
    quad.validate();
    return make_report(squeezing_moments(spec, quad.n_power, ctrl), quad.phi);
}

struct QuadratureVariance {
    double variance = 0.0;
    double circle = 0.0;
};

inline QuadratureVariance quadrature_variance(const FanStateSpec& spec, const QuadratureSpec& quad,
                                              const SeriesControl& ctrl = {}) {
    const auto r = squeezing_degree(spec, quad, ctrl);
    return {r.variance, r.circle};
}

// ---------------------------------------------------------------------------
// Critical amplitude

struct CriticalOptions {
    double tol = 1e-6;            // bisection stops once the bracket is narrower
    double xi_start = 1e-4;
    double xi_limit = 4.0;        // first search bracket [xi_start, xi_limit]
    double xi_limit_max = 8.0;    // expanded geometrically up to this
    double scan_step = 0.01;
};

struct CriticalResult {
    double xi_c = 0.0;
    int iterations = 0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

/// min over phi of S at amplitude xi for the given (k, model, N).
inline double min_squeezing(const FanStateSpec& templ, int n_power, double xi,
                            const SeriesControl& ctrl) {
    FanStateSpec spec = templ;
    spec.xi = xi;
    return squeezing_moments(spec, n_power, ctrl).s_min();
}

/// Smallest xi_c with min_phi S < 0 on (0, xi_c) and >= 0 just above it.
/// The first sign change is located on a uniform scan (S can turn negative
/// again at larger xi), then refined by bisection.
inline CriticalResult critical_xi(int k, const NonlinearityModel& model, int n_power,
                                  const SeriesControl& ctrl = {}, const CriticalOptions& opts = {}) {
    if (k < 1) throw Error(ErrorCode::invalid_argument, "fan order k must be >= 1");
    if (n_power < 1 || n_power % (2 * k) != 0)
        throw Error(ErrorCode::invalid_argument, "critical amplitude needs N to be a multiple of 2k");
    if (!(opts.tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tolerance must be positive");

    const FanStateSpec templ{k, 0.0, 0.0, model};
    auto g = [&](double xi) { return min_squeezing(templ, n_power, xi, ctrl); };

    if (!(g(opts.xi_start) < 0.0))
        throw Error(ErrorCode::no_sign_change, "no squeezing at the start of the search bracket");

    double lo = opts.xi_start;
    double hi = 0.0;
    double limit = opts.xi_limit;
    for (double xi = lo;;) {
        const double next = std::min(xi + opts.scan_step, limit);
        if (!(g(next) < 0.0)) {
            hi = next;
            break;
        }
        lo = next;
        xi = next;
        if (next >= limit) {
            if (limit >= opts.xi_limit_max)
                throw Error(ErrorCode::no_sign_change,
                            "squeezing persists up to xi = " + std::to_string(limit));
            limit = std::min(2.0 * limit, opts.xi_limit_max);
        }
    }

    CriticalResult result;
    result.bracket_lo = lo;
    result.bracket_hi = hi;
    while (hi - lo > opts.tol) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
        ++result.iterations;
    }
    result.xi_c = 0.5 * (lo + hi);
    return result;
}

}  // namespace fanstate
