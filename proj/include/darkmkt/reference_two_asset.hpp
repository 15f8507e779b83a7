#pragma once

#include <array>

#include "darkmkt/params.hpp"
#include "darkmkt/state.hpp"

namespace darkmkt::reference {

// The bundled two-asset example (configs/two_asset_example.json) together
// with the reference equilibrium table and prices published for it. The
// reference masses below are the published point; `darkmkt report` prints
// them next to freshly computed values.
inline ModelParams params() {
    ModelParams p;
    p.K = 2;
    p.lambda = {1250.0, 2000.0};
    p.gamma_u = {5.0, 8.0};
    p.gamma_d = {0.5, 3.0};
    p.m = {0.3, 0.6};
    p.gamma_tilde_u = {2.5, 0.4};
    p.gamma_tilde_d = {3.5, 1.5};
    p.delta_h = {2.5, 3.5};
    p.delta_d = {0.4, 1.5};
    p.q = 0.5;
    p.r = 0.05;
    return p;
}

// mu(h1,n), mu(h2,n), mu(l1,o), mu(l2,o)
inline constexpr std::array<double, 4> masses = {0.0991, 0.0720, 0.0011, 0.0116};
inline constexpr std::array<double, 2> mu_ho = {0.2989, 0.5883};
inline constexpr double mu_h1o_prose = 0.2984;  // table prints 0.2989
inline constexpr double mu_ln = 0.0289;
inline constexpr std::array<double, 2> prices = {50.0031, 69.6551};
inline constexpr std::array<double, 2> Gamma = {5.7159, 0.3075};
inline constexpr std::array<double, 2> Omega = {0.0011, 0.0677};
inline constexpr std::array<double, 2> Lambda = {0.9861, 0.9837};
inline constexpr std::array<double, 2> Psi = {5.6366, 0.3026};
inline constexpr std::array<double, 2> timing_days = {2.0, 1.7};
inline constexpr std::array<double, 2> price_limits_lambda = {49.0824, 57.2058};
inline constexpr std::array<double, 5> quartic = {2294300.0, 606494.0, -75548.2132,
                                                  -693.572, -1.500884};
inline constexpr double quartic_root = 0.0991;

// The reference masses as a state usable by the pricing/statics entry points.
inline ReducedState masses_state() {
    ReducedState s;
    s.x = {masses[0], masses[1], masses[2], masses[3]};
    return s;
}

}  // namespace darkmkt::reference
