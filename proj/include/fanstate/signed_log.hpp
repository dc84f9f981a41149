#pragma once

#include <cmath>
#include <limits>

namespace fanstate {

/// A real number stored as sign and natural log of its magnitude.
struct SignedLog {
    double log_abs = 0.0;  // log|x|; -inf encodes zero
    int sign = 1;

    static SignedLog from(double x) {
        if (x == 0.0) return zero();
        return {std::log(std::fabs(x)), x < 0.0 ? -1 : 1};
    }
    static SignedLog zero() { return {-std::numeric_limits<double>::infinity(), 0}; }

    bool is_zero() const { return sign == 0; }
    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

    friend SignedLog operator*(SignedLog a, SignedLog b) {
        if (a.is_zero() || b.is_zero()) return zero();
        return {a.log_abs + b.log_abs, a.sign * b.sign};
    }
    friend SignedLog operator/(SignedLog a, SignedLog b) {
        if (a.is_zero()) return zero();
        return {a.log_abs - b.log_abs, a.sign * b.sign};
    }
};

/// Running sum of log-space terms. The accumulator is held relative to a
/// reference scale that is raised whenever a term would overflow it.
class ScaledSum {
public:
    void add(SignedLog term) {
        if (term.is_zero()) return;
        if (empty_) {
            scale_ = term.log_abs;
            empty_ = false;
        } else if (term.log_abs - scale_ > kRescaleGap) {
            acc_ *= std::exp(scale_ - term.log_abs);
            scale_ = term.log_abs;
        }
        acc_ += term.sign * std::exp(term.log_abs - scale_);
    }

    /// |term| / |sum so far|; +inf while the sum is zero.
    double relative_size(SignedLog term) const {
        if (term.is_zero()) return 0.0;
        if (empty_ || acc_ == 0.0) return std::numeric_limits<double>::infinity();
        return std::exp(term.log_abs - scale_) / std::fabs(acc_);
    }

    SignedLog total() const {
        if (empty_ || acc_ == 0.0) return SignedLog::zero();
        return {scale_ + std::log(std::fabs(acc_)), acc_ < 0.0 ? -1 : 1};
    }

private:
    static constexpr double kRescaleGap = 600.0;
    double acc_ = 0.0;
    double scale_ = 0.0;
    bool empty_ = true;
};

}  // namespace fanstate
