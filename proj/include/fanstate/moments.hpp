#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <optional>
#include <string>

#include "fanstate/error.hpp"
#include "fanstate/nonlinearity.hpp"
#include "fanstate/signed_log.hpp"

namespace fanstate {

/// The fan-state |xi; 2k, f>. `xi` is the modulus; the phase of the
/// amplitude the caller started from is kept in `xi_phase` and does not
/// enter any moment (moments are evaluated in the frame where xi is real).
struct FanStateSpec {
    int k = 1;
    double xi = 0.0;
    double xi_phase = 0.0;
    NonlinearityModel model = model::Unity{};

    static FanStateSpec from_complex(int k, std::complex<double> xi, NonlinearityModel m) {
        return {k, std::abs(xi), std::abs(xi) == 0.0 ? 0.0 : std::arg(xi), std::move(m)};
    }

    /// Angle that maps the original complex amplitude onto the positive real axis.
    double rotation() const { return -xi_phase; }

    void validate() const {
        if (k < 1) throw Error(ErrorCode::invalid_argument, "fan order k must be >= 1");
        if (!std::isfinite(xi) || xi < 0.0)
            throw Error(ErrorCode::invalid_argument, "xi must be finite and non-negative");
        fanstate::validate(model);
    }
};

struct SeriesControl {
    int n_max = 200;
    double rel_tol = 1e-15;
    int consecutive_small = 3;

    void validate() const {
        if (n_max < 4) throw Error(ErrorCode::invalid_argument, "n_max must be >= 4");
        if (!(rel_tol > 0.0) || !(rel_tol < 1.0))
            throw Error(ErrorCode::invalid_argument, "rel_tol must lie in (0, 1)");
        if (consecutive_small < 1)
            throw Error(ErrorCode::invalid_argument, "consecutive_small must be >= 1");
    }
};

struct MomentValue {
    double value = 0.0;
    int terms_used = 0;
    bool converged = true;
    double last_term_ratio = 0.0;
};

/// J_k(m) = sum_{n=0}^{2k-1} exp(i pi n m): 2k for even m, 0 for odd m.
constexpr double j_k(int k, long m) {
    return (m % 2 == 0) ? 2.0 * k : 0.0;
}

namespace detail {

inline long ceil_div(long a, long b) {
    return a <= 0 ? 0 : (a + b - 1) / b;
}

// Sums log-space terms t(n) for n = first, first + 2, ... (odd n are J-parity
// zeros and never visited) until `consecutive_small` terms in a row fall below
// rel_tol relative to the partial sum.
template <class TermFn>
std::pair<SignedLog, MomentValue> sum_even_index_series(long first, TermFn&& term,
                                                        const SeriesControl& ctrl,
                                                        const char* what) {
    ScaledSum sum;
    MomentValue meta;
    meta.converged = false;
    int streak = 0;
    for (long n = first + (first % 2); n <= ctrl.n_max; n += 2) {
        const SignedLog t = term(n);
        sum.add(t);
        ++meta.terms_used;
        meta.last_term_ratio = sum.relative_size(t);
        streak = meta.last_term_ratio <= ctrl.rel_tol ? streak + 1 : 0;
        if (streak >= ctrl.consecutive_small) {
            meta.converged = true;
            break;
        }
    }
    if (!meta.converged) {
        throw Error(ErrorCode::non_convergence,
                    std::string(what) + " series not converged within n_max = " +
                        std::to_string(ctrl.n_max));
    }
    return {sum.total(), meta};
}

}  // namespace detail

/// Series evaluator for one fan-state. Holds the super-factorial memo, so a
/// single instance must not be used from several threads at once; create
/// one per thread instead.
class MomentEngine {
public:
    MomentEngine(FanStateSpec spec, SeriesControl ctrl = {})
        : spec_(std::move(spec)), ctrl_(ctrl), table_(spec_.model, spec_.k) {
        spec_.validate();
        ctrl_.validate();
        log_xi_ = spec_.xi > 0.0 ? std::log(spec_.xi) : 0.0;
    }

    const FanStateSpec& spec() const { return spec_; }
    const SeriesControl& control() const { return ctrl_; }

    /// D_k(xi^2) = sum_m xi^{4km} J_k(m)^2 / ((2km)! [F(2km)]^2).
    MomentValue normalization() {
        if (!norm_) norm_ = compute_normalization();
        return norm_->second;
    }

    /// <a^dag^l a^m> in the fan-state.
    MomentValue moment(int l, int m) {
        if (l < 0 || m < 0) throw Error(ErrorCode::invalid_argument, "moment orders must be >= 0");
        const long two_k = 2L * spec_.k;
        const long diff = static_cast<long>(l) - m;
        if (diff % two_k != 0) return {0.0, 0, true, 0.0};          // I((l-m)/2k) = 0
        if (std::labs(diff / two_k) % 2 == 1) return {0.0, 0, true, 0.0};  // J_k(n+s) J_k(n) = 0
        if (spec_.xi == 0.0) return {(l == 0 && m == 0) ? 1.0 : 0.0, 0, true, 0.0};

        const double j_sq = 4.0 * spec_.k * spec_.k;
        auto term = [&](long n) {
            const long level = two_k * n;
            const long lowered = level - m;
            const SignedLog xi_pow{static_cast<double>(2 * level + diff) * log_xi_, 1};
            const SignedLog fact{-std::lgamma(static_cast<double>(lowered) + 1.0), 1};
            return SignedLog{std::log(j_sq), 1} * xi_pow * fact /
                   (table_.log_at(level) * table_.log_at(level + diff));
        };
        auto [num, meta] =
            detail::sum_even_index_series(detail::ceil_div(m, two_k), term, ctrl_, "moment");
        ensure_normalization();
        meta.value = (num / norm_->first).value();
        return meta;
    }

private:
    std::pair<SignedLog, MomentValue> compute_normalization() {
        const double d0 = 4.0 * spec_.k * spec_.k;
        if (spec_.xi == 0.0) return {SignedLog::from(d0), {d0, 1, true, 0.0}};
        const long two_k = 2L * spec_.k;
        auto term = [&](long m) {
            const long level = two_k * m;
            const SignedLog f = table_.log_at(level);
            return SignedLog{std::log(d0) + 2.0 * level * log_xi_ -
                                 std::lgamma(static_cast<double>(level) + 1.0) - 2.0 * f.log_abs,
                             1};
        };
        auto [total, meta] = detail::sum_even_index_series(0, term, ctrl_, "normalization");
        meta.value = total.value();
        return {total, meta};
    }

    void ensure_normalization() {
        if (!norm_) norm_ = compute_normalization();
    }

    FanStateSpec spec_;
    SeriesControl ctrl_;
    SuperFactorialTable table_;
    double log_xi_ = 0.0;
    std::optional<std::pair<SignedLog, MomentValue>> norm_;
};

inline MomentValue normalization_dk(const FanStateSpec& spec, const SeriesControl& ctrl = {}) {
    return MomentEngine(spec, ctrl).normalization();
}

inline MomentValue moment_general(const FanStateSpec& spec, int l, int m,
                                  const SeriesControl& ctrl = {}) {
    return MomentEngine(spec, ctrl).moment(l, m);
}

// ---------------------------------------------------------------------------
// f = 1 fast paths. Each series is summed by the plain term-ratio recurrence
// of its own closed form, independently of MomentEngine.

enum class UnityMoment { aN, a2N, adagN_aN };

namespace detail {

// sum_{j>=0} x^{step*j} offset! / (offset + step*j)!, i.e. the series divided
// by its first term; the caller supplies the first term.
struct RatioSeries {
    double sum = 0.0;
    int terms = 0;
    double last_ratio = 0.0;
};

inline RatioSeries factorial_ratio_series(double log_x, long offset, long step,
                                          const SeriesControl& ctrl, long max_terms) {
    RatioSeries out;
    double t = 1.0;
    int streak = 0;
    for (long j = 0; j < max_terms; ++j) {
        if (j > 0) {
            // t_j / t_{j-1} = x^step / ((offset+step*(j-1)+1) ... (offset+step*j))
            double r = std::exp(static_cast<double>(step) * log_x);
            for (long q = offset + step * (j - 1) + 1; q <= offset + step * j; ++q)
                r /= static_cast<double>(q);
            t *= r;
        }
        out.sum += t;
        ++out.terms;
        out.last_ratio = t / out.sum;
        streak = out.last_ratio <= ctrl.rel_tol ? streak + 1 : 0;
        if (streak >= ctrl.consecutive_small) return out;
    }
    throw Error(ErrorCode::non_convergence, "unity fast-path series not converged");
}

}  // namespace detail

/// <a^N>, <a^{2N}> or <a^dag^N a^N> for f = 1 via the specialized series.
inline MomentValue moment_unity_fastpath(const FanStateSpec& spec, UnityMoment kind, int n_power,
                                         const SeriesControl& ctrl = {}) {
    spec.validate();
    ctrl.validate();
    if (!is_unity(spec.model))
        throw Error(ErrorCode::invalid_argument, "fast path requires the unity model");
    if (n_power < 1) throw Error(ErrorCode::invalid_argument, "power N must be >= 1");

    const long k = spec.k;
    const long N = n_power;
    if (spec.xi == 0.0) return {0.0, 0, true, 0.0};
    const double log_xi = std::log(spec.xi);
    const long max_terms = ctrl.n_max / 2 + 1;

    // D_k = 4k^2 sum_j xi^{8kj} / (4kj)!
    const auto dk = detail::factorial_ratio_series(2.0 * log_xi, 0, 4 * k, ctrl, max_terms);
    const double log_d = std::log(4.0 * k * k * dk.sum);

    if (kind == UnityMoment::adagN_aN) {
        // 4k^2/D sum_{n: 4kn >= N} xi^{8kn} / (4kn - N)!
        const long n0 = detail::ceil_div(N, 4 * k);
        const long offset = 4 * k * n0 - N;
        const auto s = detail::factorial_ratio_series(2.0 * log_xi, offset, 4 * k, ctrl, max_terms);
        const double log_first = std::log(4.0 * k * k) + 8.0 * k * n0 * log_xi -
                                 std::lgamma(static_cast<double>(offset) + 1.0);
        return {std::exp(log_first - log_d) * s.sum, s.terms, true, s.last_ratio};
    }

    const long power = kind == UnityMoment::aN ? N : 2 * N;
    // xi^{-P}/D I(-P/2k) sum_n theta(2kn - P) xi^{4kn} J_k(n - P/2k) J_k(n) / (2kn - P)!
    if (power % (2 * k) != 0) return {0.0, 0, true, 0.0};
    const long shift = power / (2 * k);
    if (shift % 2 != 0) return {0.0, 0, true, 0.0};
    const long n0 = shift;  // theta: 2kn >= P; J parity: n even (shift is even here)
    const long offset = 2 * k * n0 - power;
    const auto s = detail::factorial_ratio_series(2.0 * log_xi, offset, 4 * k, ctrl, max_terms);
    const double log_first = std::log(4.0 * k * k) + static_cast<double>(4 * k * n0 - power) * log_xi -
                             std::lgamma(static_cast<double>(offset) + 1.0);
    return {std::exp(log_first - log_d) * s.sum, s.terms, true, s.last_ratio};
}

}  // namespace fanstate
