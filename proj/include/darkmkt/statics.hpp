#pragma once

#include <optional>
#include <string>
#include <vector>

#include "darkmkt/pricing.hpp"

namespace darkmkt {

// Parameter paths for sweeps and overrides: "lambda.2", "gamma_u.1",
// "delta_h.1", "m.2", "q", "r" (indices are 1-based).
ModelParams with_param(const ModelParams& base, const std::string& path, double value);
double get_param(const ModelParams& base, const std::string& path);

enum class LimitKind { gamma_u, gamma_d, gamma_tilde_d, lambda };

struct LimitReport {
    LimitKind kind;
    // Limit of the price actually computed by equilibrium_prices (masses
    // frozen at the reference point) as the parameter family is scaled to
    // infinity jointly across assets.
    std::vector<double> analytic;
    // The closed-form limit printed in the source material, verbatim.
    std::vector<double> reference_formula;
    std::vector<std::vector<double>> scaling_prices;  // one row per k = 0..6
    std::vector<double> scale_factors;                // 10^k
    std::vector<bool> converged;  // |price(1e6 base) - analytic| < 1e-3 |analytic|
    bool reference_formula_deviates = false;
    std::string note;
};

LimitReport limit_gamma_u(const ValidatedParams& p, const ReducedState& x_ref);
LimitReport limit_gamma_d(const ValidatedParams& p, const ReducedState& x_ref);
// Prop. 6.1 states this limit does not exist; its proof derives a formula
// anyway. Both the formula and the scaling sequence are reported, flagged.
LimitReport limit_gamma_tilde_d(const ValidatedParams& p, const ReducedState& x_ref);
LimitReport limit_lambda(const ValidatedParams& p, const ReducedState& x_ref);

struct ThetaLimits {
    double equal_weights = 0.0;   // lim Theta with gamma_tilde_ui identical
    double linear_weights = 0.0;  // lim Theta with gamma_tilde_ui = i * gamma_tilde_u1
    double difference = 0.0;
};

// Demonstrates path dependence of Theta as the gamma_tilde_u family grows.
ThetaLimits gamma_tilde_u_path_dependence(const ValidatedParams& p, const ReducedState& x_ref);

struct LambdaHat {
    bool exists = false;       // denominator positive: threshold applies
    double value = 0.0;        // threshold where the canonical price slope flips
    double reference_value = 0.0;  // verbatim published numerator variant
    double denominator = 0.0;  // signed; <= 0 means the always-one-direction case
};

LambdaHat lambda_hat(const ValidatedParams& p, const ReducedState& x_ref, int j);

enum class SweepMode { frozen, self_consistent };
enum class Monotonicity { increasing, decreasing, constant, non_monotone };

struct SweepResult {
    std::string param_path;
    SweepMode mode = SweepMode::frozen;
    std::vector<double> grid;
    std::vector<std::vector<double>> prices;  // grid point -> K prices
    std::vector<bool> converged;
};

// mode frozen: hold the reference masses and re-evaluate the price formulas
// per grid point. mode self_consistent: re-solve the steady state per point.
// Failed points are marked and skipped, the sweep continues.
SweepResult price_sweep(const ValidatedParams& p, const ReducedState& x_ref,
                        const std::string& param_path, const std::vector<double>& grid,
                        SweepMode mode, int jobs = 1);

// Sign pattern of successive differences with dead-band 1e-9, over converged
// points only. price_index is 0-based.
Monotonicity classify_monotonicity(const SweepResult& sweep, int price_index);

const char* to_string(Monotonicity m);

}  // namespace darkmkt
