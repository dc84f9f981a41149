#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fanstate {

enum class ErrorCode {
    invalid_argument,
    cutoff_too_small,
    guard_band_violation,
    non_convergence,
    no_sign_change,
    laguerre_zero,
    nonlinearity_singular,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::cutoff_too_small: return "cutoff-too-small";
        case ErrorCode::guard_band_violation: return "guard-band-violation";
        case ErrorCode::non_convergence: return "non-convergence";
        case ErrorCode::no_sign_change: return "no-sign-change";
        case ErrorCode::laguerre_zero: return "laguerre-zero";
        case ErrorCode::nonlinearity_singular: return "nonlinearity-singular";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    bool is_singularity() const noexcept {
        return code_ == ErrorCode::laguerre_zero || code_ == ErrorCode::nonlinearity_singular;
    }

private:
    ErrorCode code_;
};

}  // namespace fanstate
