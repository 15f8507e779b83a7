#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "darkmkt/state.hpp"

namespace darkmkt {

struct SteadyState {
    ReducedState x;
    double residual = 0.0;  // max-norm of reduced_rhs at x
    int iterations = 0;
    std::string method;  // "newton" or "newton+fixed-point"
};

// Seller mass implied by a buyer mass at a steady state:
//   x_{K+i} = gamma_di m_i / (lambda_i x_i + gamma_i)
double seller_mass_at_steady(double buyer_mass, const ValidatedParams& p, int i);

// Newton with backtracking on the K-dimensional system in the buyer masses
// (seller masses eliminated), falling back to damped fixed-point iteration
// if Newton stalls. Default start: x_i = gamma_tilde_ui (1-m) / gamma_tilde_i.
// Throws ConvergenceError with the last iterate and residual on failure.
SteadyState solve_steady_state(const ValidatedParams& p,
                               std::optional<ReducedState> x0 = std::nullopt,
                               double tol = 1e-12);

// Quartic c4 x^4 + c3 x^3 + c2 x^2 + c1 x + c0 in x = mu(h1,n) for K = 2,
// obtained by exact polynomial elimination of mu(h2,n) between the two
// steady-state scalar equations. coeff[0] = c4 ... coeff[4] = c0.
struct QuarticCoeffs {
    std::array<double, 5> coeff{};
    double c4() const { return coeff[0]; }
};

QuarticCoeffs k2_quartic(const ValidatedParams& p);  // throws unless K == 2, non-degenerate

double quartic_eval(const QuarticCoeffs& c, double x);

// Isolates the unique root in (lo, hi) by scanning for sign changes, then
// bisection plus Newton polish to 1e-12. Errors (listing all real roots)
// when the window contains zero or several roots.
double quartic_positive_root(const QuarticCoeffs& c, double lo = 0.0, double hi = 1.0);

// All real roots via the companion matrix (used for error reporting and the
// root-count check).
std::vector<double> quartic_real_roots(const QuarticCoeffs& c);

struct UniquenessReport {
    int n_starts = 0;
    int n_converged = 0;
    int n_failed = 0;
    int n_clusters = 0;
    double max_pairwise_spread = 0.0;  // over converged solutions
    ReducedState representative;
};

// Multi-start check from Latin-hypercube starts over the feasible box; all
// converged runs are clustered at 1e-8 resolution.
UniquenessReport verify_uniqueness_scan(const ValidatedParams& p, int n_starts = 64,
                                        unsigned long long seed = 0);

}  // namespace darkmkt
