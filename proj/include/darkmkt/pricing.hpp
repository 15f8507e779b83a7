#pragma once

#include <vector>

#include "darkmkt/equilibrium.hpp"

namespace darkmkt {

// All pricing operations evaluate at a given mass point (buyer masses
// mu(hi,n), seller masses mu(li,o) = a ReducedState); formulas use the
// masses as given.
struct PricingIntermediates {
    std::vector<double> a;      // lambda_i mu(li,o)
    std::vector<double> d;      // lambda_i mu(hi,n)
    std::vector<double> b;      // gamma_tilde_di + r + a_i
    std::vector<double> c;      // gamma_ui + r + d_i
    std::vector<double> rho;    // gamma_di + r (rate in the V(hi,o) relation)
    std::vector<double> Psi;
    std::vector<double> Gamma;
    std::vector<double> Lambda;  // Psi/Gamma, in (0,1)
    std::vector<double> Omega;   // delta_di / (q d_i Gamma)
    double Theta = 0.0;          // sum gtu Omega / (r + sum gtu (1-Lambda)) = V(l,n)
};

// Throws ValidationError ("singular market") when any a_i or d_i < 1e-14.
PricingIntermediates intermediates(const ValidatedParams& p, const ReducedState& x);

struct ValueFunctions {
    std::vector<double> x;  // V(hi,n)
    std::vector<double> y;  // V(li,o)
    std::vector<double> z;  // V(hi,o)
    double w = 0.0;         // V(l,n)
};

// Closed-form steady-state value functions:
//   x_i = Lambda_i Theta + Omega_i
//   y_i = rho_i/((1-q) a_i Gamma_i) Theta + delta_hi/r
//         - (rho_i/r) Omega_i (gamma_tilde_di + r + (1-q)a_i)/((1-q)a_i)
//   z_i = (gamma_di y_i + delta_hi)/rho_i,  w = Theta
ValueFunctions value_functions_closed(const ValidatedParams& p, const ReducedState& x);

// Assembles and solves the (3K+1)-dimensional steady-state value system with
// the price eliminated via P_i = (1-q)(y_i - w) + q(z_i - x_i); enforces a
// residual below 1e-10 * scale on every equation.
ValueFunctions hjb_linear_solve(const ValidatedParams& p, const ReducedState& x);

struct ReservationValues {
    std::vector<double> delta_l;  // y_i - w : seller's minimum
    std::vector<double> delta_h;  // z_i - x_i : buyer's maximum
};

ReservationValues reservation_values(const ValueFunctions& vf);

// The same reservation values assembled directly from the closed forms
// (cross-check route; equals reservation_values(value_functions_closed(...))).
ReservationValues reservation_values_closed(const ValidatedParams& p, const ReducedState& x);

struct PriceReport {
    std::vector<double> delta_l;
    std::vector<double> delta_h;
    std::vector<double> price;            // canonical: (1-q) delta_l + q delta_h
    std::vector<double> price_bargain;    // identical combination, kept for auditing
    std::vector<double> price_display;    // the published closed-form display, verbatim
    std::vector<bool> display_deviates;   // display differs from price beyond 1e-9 rel
    std::vector<double> timing_days;
    std::vector<bool> timing_infinite;
    double min_timing_days = 0.0;
    double max_timing_days = 0.0;
    double q_effective = 0.0;
};

PriceReport equilibrium_prices(const ValidatedParams& p, const ReducedState& x,
                               double days_per_year = 250.0);

// Blended bargaining power when an unsophisticated investor keeps a single
// partner; q_hat is the per-meeting proposal probability of the seller.
double effective_bargaining_power(double q_hat, const ValidatedParams& p,
                                  const ReducedState& x);

struct SellerTiming {
    std::vector<double> days;  // days_per_year / (lambda_i mu(hi,n))
    std::vector<bool> infinite;
    double min_days = 0.0;  // first asset sold
    double max_days = 0.0;  // maximum equilibrium timing
};

SellerTiming seller_timing(const ValidatedParams& p, const ReducedState& x,
                           double days_per_year = 250.0);

}  // namespace darkmkt
