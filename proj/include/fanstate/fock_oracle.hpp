#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "fanstate/error.hpp"
#include "fanstate/moments.hpp"
#include "fanstate/nonlinearity.hpp"

// Brute-force reference: the fan-state as an explicit, truncated vector of
// Fock amplitudes. Nothing here goes through MomentEngine or the
// super-factorial table, so it can be used to check them.

namespace fanstate::oracle {

struct OracleOptions {
    /// Largest allowed norm fraction in the top 10% of levels.
    double tail_tolerance = 1e-14;
};

inline constexpr int kDefaultCutoff = 80;

struct TruncatedFockState {
    std::vector<std::complex<double>> amplitudes;  // c_n, n = 0..n_max
    int n_max = 0;
    int k = 1;
    bool real = true;             // all amplitudes real by construction
    double tail_fraction = 0.0;   // norm fraction held by levels above 0.9 n_max

    double norm_squared() const {
        double s = 0.0;
        for (const auto& c : amplitudes) s += std::norm(c);
        return s;
    }
};

namespace detail {

// sum_{j=0}^{2k-1} exp(i pi j n), with exp(i pi) = -1 taken exactly.
inline double fan_phase_sum(int k, long n) {
    double s = 0.0;
    for (int j = 0; j < 2 * k; ++j) s += ((static_cast<long>(j) * n) % 2 == 0) ? 1.0 : -1.0;
    return s;
}

}  // namespace detail

/// Fan-state truncated at Fock level `n_max`. Amplitudes on the multi-quantum
/// ladder follow the eigenvalue recursion of a^{2k} f(n):
///   c_{2k(j+1)} sqrt((2k(j+1))! / (2kj)!) f(2k(j+1)) = xi^{2k} c_{2kj},
/// each then weighted by the phase sum J_k(j).
inline TruncatedFockState build_fan_state(const FanStateSpec& spec, int n_max,
                                          const OracleOptions& opts = {}) {
    spec.validate();
    const int two_k = 2 * spec.k;
    if (n_max < two_k)
        throw Error(ErrorCode::invalid_argument, "oracle cutoff must be >= 2k");

    TruncatedFockState state;
    state.n_max = n_max;
    state.k = spec.k;
    state.real = spec.xi_phase == 0.0;
    state.amplitudes.assign(static_cast<std::size_t>(n_max) + 1, {0.0, 0.0});

    if (spec.xi == 0.0) {
        state.amplitudes[0] = 1.0;
        return state;
    }

    // Ladder amplitudes before the J_k weight, as (log|c|, sign).
    const double log_xi = std::log(spec.xi);
    std::vector<double> log_c;
    std::vector<int> sign;
    log_c.push_back(0.0);
    sign.push_back(1);
    for (int level = two_k; level <= n_max; level += two_k) {
        const double f = f_value(spec.model, level, spec.k);
        if (!std::isfinite(f) || std::fabs(f) < kSuperfactorialFloor)
            throw Error(ErrorCode::nonlinearity_singular,
                        "f vanishes or diverges at level " + std::to_string(level));
        double log_ratio = two_k * log_xi - std::log(std::fabs(f));
        for (int q = level - two_k + 1; q <= level; ++q) log_ratio -= 0.5 * std::log(q);
        log_c.push_back(log_c.back() + log_ratio);
        sign.push_back(f < 0.0 ? -sign.back() : sign.back());
    }

    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < log_c.size(); ++j)
        if (detail::fan_phase_sum(spec.k, static_cast<long>(j)) != 0.0) peak = std::max(peak, log_c[j]);

    for (std::size_t j = 0; j < log_c.size(); ++j) {
        const double weight = detail::fan_phase_sum(spec.k, static_cast<long>(j));
        if (weight == 0.0) continue;
        const double mag = weight * sign[j] * std::exp(log_c[j] - peak);
        // complex xi contributes exp(i 2k j phase)
        state.amplitudes[j * two_k] = std::polar(1.0, static_cast<double>(two_k * j) * spec.xi_phase) * mag;
    }

    const double total = std::sqrt(state.norm_squared());
    for (auto& c : state.amplitudes) c /= total;
    if (state.real)
        for (auto& c : state.amplitudes) c = {c.real(), 0.0};

    const int band_start = n_max - n_max / 10;
    double tail = 0.0;
    for (int n = band_start + 1; n <= n_max; ++n) tail += std::norm(state.amplitudes[n]);
    state.tail_fraction = tail;
    if (tail > opts.tail_tolerance)
        throw Error(ErrorCode::cutoff_too_small,
                    "norm fraction " + std::to_string(tail) + " in the top levels exceeds tolerance");
    return state;
}

inline void check_guard_band(const TruncatedFockState& state, int l, int m) {
    if (l < 0 || m < 0)
        throw Error(ErrorCode::invalid_argument, "ladder orders must be >= 0");
    if (2 * std::max(l, m) > state.n_max)
        throw Error(ErrorCode::guard_band_violation,
                    "orders (" + std::to_string(l) + ", " + std::to_string(m) +
                        ") need a cutoff of at least " + std::to_string(2 * std::max(l, m)));
}

/// <a^dag^l a^m> by direct matrix elements, complex-valued.
inline std::complex<double> ladder_moment_complex(const TruncatedFockState& state, int l, int m) {
    check_guard_band(state, l, m);
    std::complex<double> sum = 0.0;
    for (int n = m; n <= state.n_max; ++n) {
        const int target = n - m + l;
        if (target > state.n_max) break;
        const auto& c = state.amplitudes[n];
        const auto& c_target = state.amplitudes[target];
        if (c == 0.0 || c_target == 0.0) continue;
        // sqrt(n!/(n-m)!) sqrt(target!/(n-m)!)
        const double lowered = std::lgamma(n - m + 1.0);
        const double element =
            std::exp(0.5 * (std::lgamma(n + 1.0) - lowered) + 0.5 * (std::lgamma(target + 1.0) - lowered));
        sum += std::conj(c_target) * c * element;
    }
    return sum;
}

inline double ladder_moment(const TruncatedFockState& state, int l, int m) {
    const auto z = ladder_moment_complex(state, l, m);
    if (state.real && std::fabs(z.imag()) > 1e-12)
        throw std::logic_error("imaginary part in a real fan-state moment");
    return z.real();
}

/// <[a^N, a^dag^N]> through the normally ordered expansion
///   sum_q N! N^(q) / ((N-q)! q!) <a^dag^{N-q} a^{N-q}>.
inline double commutator_expectation_oracle(const TruncatedFockState& state, int n_power) {
    if (n_power < 1) throw Error(ErrorCode::invalid_argument, "power N must be >= 1");
    check_guard_band(state, n_power, n_power);
    double total = 0.0;
    double binom = 1.0;   // C(N, q)
    double falling = 1.0; // N (N-1) ... (N-q+1)
    for (int q = 1; q <= n_power; ++q) {
        binom = binom * (n_power - q + 1) / q;
        falling *= (n_power - q + 1);
        total += binom * falling * ladder_moment(state, n_power - q, n_power - q);
    }
    return total;
}

}  // namespace fanstate::oracle
