// Prints S(phi) for k = 1, N = 2 at |xi| = 0.8 together with the minimizing
// directions and the critical amplitude.

#include <cstdio>
#include <numbers>

#include "fanstate/fanstate.hpp"

int main() {
    using namespace fanstate;
    const FanStateSpec spec{1, 0.8, 0.0, model::Unity{}};
    const auto sm = squeezing_moments(spec, 2);

    for (int j = 0; j <= 8; ++j) {
        const double phi = j * std::numbers::pi / 8.0;
        std::printf("phi = %6.4f  S = % .6f\n", phi, sm.s_at(phi));
    }
    for (double phi : minimizing_angles(sm)) std::printf("minimum at %.6f\n", phi);

    const auto crit = critical_xi(1, model::Unity{}, 2);
    std::printf("xi_c = %.8f (%d bisection steps)\n", crit.xi_c, crit.iterations);
}
