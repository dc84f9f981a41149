#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "fanstate/error.hpp"
#include "fanstate/signed_log.hpp"

namespace fanstate {

/// Generalized Laguerre polynomial L^alpha_degree(x) by forward recurrence
///   (j+1) L_{j+1} = (2j + 1 + alpha - x) L_j - (j + alpha) L_{j-1}.
template <std::floating_point T>
T laguerre(int alpha, int degree, T x) {
    if (degree <= 0) return T(1);
    const T a = static_cast<T>(alpha);
    T prev = T(1);
    T curr = T(1) + a - x;
    for (int j = 1; j < degree; ++j) {
        const T jt = static_cast<T>(j);
        const T next = ((T(2) * jt + T(1) + a - x) * curr - (jt + a) * prev) / (jt + T(1));
        prev = curr;
        curr = next;
    }
    return curr;
}

// ---------------------------------------------------------------------------
// Nonlinearity models

namespace model {

struct Unity {
    friend bool operator==(const Unity&, const Unity&) = default;
};

/// Trapped-ion vibrational nonlinearity. Stores eta^2 since only the
/// squared Lamb-Dicke parameter enters the Laguerre arguments.
struct IonTrap {
    double eta_squared = 0.0;

    static IonTrap from_eta(double eta) { return {eta * eta}; }
    friend bool operator==(const IonTrap&, const IonTrap&) = default;
};

struct QDeformed {
    double lambda = 0.0;
    friend bool operator==(const QDeformed&, const QDeformed&) = default;
};

struct PhotonAdded {
    int m = 1;
    friend bool operator==(const PhotonAdded&, const PhotonAdded&) = default;
};

}  // namespace model

using NonlinearityModel =
    std::variant<model::Unity, model::IonTrap, model::QDeformed, model::PhotonAdded>;

inline bool is_unity(const NonlinearityModel& m) {
    return std::holds_alternative<model::Unity>(m);
}

inline std::string model_name(const NonlinearityModel& m) {
    struct {
        std::string operator()(const model::Unity&) const { return "unity"; }
        std::string operator()(const model::IonTrap&) const { return "iontrap"; }
        std::string operator()(const model::QDeformed&) const { return "qdeformed"; }
        std::string operator()(const model::PhotonAdded&) const { return "photon-added"; }
    } visitor;
    return std::visit(visitor, m);
}

inline void validate(const NonlinearityModel& m) {
    if (const auto* ion = std::get_if<model::IonTrap>(&m)) {
        if (!(ion->eta_squared > 0.0) || !std::isfinite(ion->eta_squared))
            throw Error(ErrorCode::invalid_argument, "ion-trap model needs eta^2 > 0");
    } else if (const auto* q = std::get_if<model::QDeformed>(&m)) {
        if (!std::isfinite(q->lambda))
            throw Error(ErrorCode::invalid_argument, "q-deformed lambda must be finite");
    } else if (const auto* pa = std::get_if<model::PhotonAdded>(&m)) {
        if (pa->m < 1)
            throw Error(ErrorCode::invalid_argument, "photon-added m must be a positive integer");
    }
}

/// |L^0_j(eta^2)| below this (relative to L^0_0 = 1) is treated as a pole of f.
inline constexpr double kLaguerreSingularityFloor = 1e-12;

/// |f(n)| below this makes the chained super-factorial singular.
inline constexpr double kSuperfactorialFloor = 1e-300;

namespace detail {

// log(sinh(y)) for y > 0 without overflow.
inline double log_sinh(double y) {
    return y + std::log1p(-std::exp(-2.0 * y)) - std::numbers::ln2;
}

inline double ion_trap_f(double eta2, long n, int k) {
    const long two_k = 2L * k;
    if (n < two_k) return 1.0;
    const int degree = static_cast<int>(n - two_k);
    const double denominator = laguerre<double>(0, degree, eta2);
    if (std::fabs(denominator) < kLaguerreSingularityFloor) {
        throw Error(ErrorCode::laguerre_zero,
                    "L^0_" + std::to_string(degree) + "(eta^2) vanishes at level " +
                        std::to_string(n));
    }
    // (n-2k)!/n! as a product of reciprocals
    double falling = 1.0;
    for (long j = n - two_k + 1; j <= n; ++j) falling /= static_cast<double>(j);
    return falling * laguerre<double>(static_cast<int>(two_k), degree, eta2) / denominator;
}

inline double q_deformed_f(double lambda, long n) {
    if (n == 0 || lambda == 0.0) return 1.0;
    const double y = std::fabs(lambda);
    const double nd = static_cast<double>(n);
    return std::exp(0.5 * (log_sinh(nd * y) - std::log(nd) - log_sinh(y)));
}

}  // namespace detail

/// f(n) for the selected model. `k` is the fan order; only the ion-trap
/// model depends on it.
inline double f_value(const NonlinearityModel& m, long n, int k) {
    struct {
        long n;
        int k;
        double operator()(const model::Unity&) const { return 1.0; }
        double operator()(const model::IonTrap& ion) const {
            return detail::ion_trap_f(ion.eta_squared, n, k);
        }
        double operator()(const model::QDeformed& q) const {
            return detail::q_deformed_f(q.lambda, n);
        }
        double operator()(const model::PhotonAdded& pa) const {
            return 1.0 - static_cast<double>(pa.m) / (1.0 + static_cast<double>(n));
        }
    } visitor{n, k};
    return std::visit(visitor, m);
}

/// Chained product f(p) f(p-2k) f(p-4k) ... memoized in log space.
///
/// F(p) = 1 for 0 <= p < 2k and F(p) = f(p) F(p-2k) otherwise, so the chain
/// stops at the first level below 2k. One table serves one (model, k) pair;
/// it is not shared between threads.
class SuperFactorialTable {
public:
    SuperFactorialTable(NonlinearityModel model, int k)
        : model_(std::move(model)), k_(k), chains_(static_cast<std::size_t>(2 * k)) {
        if (k < 1) throw Error(ErrorCode::invalid_argument, "fan order k must be >= 1");
        validate(model_);
    }

    const NonlinearityModel& model() const { return model_; }
    int k() const { return k_; }

    SignedLog log_at(long p) {
        if (p < 0) throw Error(ErrorCode::invalid_argument, "super-factorial of negative level");
        const long two_k = 2L * k_;
        if (p < two_k || is_unity(model_)) return {0.0, 1};
        auto& chain = chains_[static_cast<std::size_t>(p % two_k)];
        const auto steps = static_cast<std::size_t>(p / two_k);  // chain[0] is the level below 2k
        if (chain.empty()) chain.push_back({0.0, 1});
        while (chain.size() <= steps) {
            const long level = p % two_k + two_k * static_cast<long>(chain.size());
            const double f = f_value(model_, level, k_);
            if (!std::isfinite(f) || std::fabs(f) < kSuperfactorialFloor) {
                throw Error(ErrorCode::nonlinearity_singular,
                            "f vanishes or diverges at level " + std::to_string(level));
            }
            chain.push_back(chain.back() * SignedLog::from(f));
        }
        return chain[steps];
    }

    double at(long p) { return log_at(p).value(); }

private:
    NonlinearityModel model_;
    int k_;
    std::vector<std::vector<SignedLog>> chains_;
};

inline double f_superfactorial(const NonlinearityModel& m, long p, int k) {
    SuperFactorialTable table(m, k);
    return table.at(p);
}

// ---------------------------------------------------------------------------
// Drive parameters -> fan amplitude

struct IonTrapDrive {
    double eta = 0.0;
    double omega0 = 0.0;
    double omega1 = 0.0;
    double phi0 = 0.0;  // radians
    double phi1 = 0.0;  // radians
    int k = 1;
};

struct DriveAmplitude {
    std::complex<double> xi;  // principal 2k-th root
    double magnitude = 0.0;
    double rotation = 0.0;    // angle that rotates xi onto the positive real axis
};

/// Principal root of xi^{2k} = -exp(i(phi1 - phi0)) Omega0 / ((i eta)^{2k} Omega1).
inline DriveAmplitude xi_from_drive(const IonTrapDrive& d) {
    if (!(d.eta > 0.0) || !(d.omega0 > 0.0) || !(d.omega1 > 0.0) || d.k < 1)
        throw Error(ErrorCode::invalid_argument,
                    "drive needs eta > 0, omega0 > 0, omega1 > 0 and k >= 1");
    const int two_k = 2 * d.k;
    // (i eta)^{2k} = (-1)^k eta^{2k}
    const double ratio = d.omega0 / (std::pow(d.eta, two_k) * d.omega1);
    const double parity = (d.k % 2 == 0) ? -1.0 : 1.0;
    const std::complex<double> xi_pow = parity * std::polar(ratio, d.phi1 - d.phi0);
    const double magnitude = std::pow(ratio, 1.0 / two_k);
    const double arg = std::arg(xi_pow) / two_k;
    return {std::polar(magnitude, arg), magnitude, -arg};
}

}  // namespace fanstate
