#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "darkmkt/equilibrium.hpp"

namespace darkmkt {

// 2K x 2K Jacobian of the reduced field at x, in blocks
//   [ A11 A12 ; A21 A22 ] with A12, A21, A22 diagonal.
Eigen::MatrixXd jacobian(const ReducedState& x, const ValidatedParams& p);

// Entry formula b_ii = gamma_tilde_i + (lambda_i gamma_i / (gamma_di m_i)) w_i^2,
// valid at steady states where w_i = x_{K+i}.
double b_diag_entry(double seller_mass, const ValidatedParams& p, int i);

// K x K matrix with the diagonal above and row-constant off-diagonal
// -gamma_tilde_ui. Requires a converged steady state (residual <= 1e-8).
Eigen::MatrixXd b_matrix(const SteadyState& s, const ValidatedParams& p);

// Leading principal minors det(B_pp), p = 1..K, via LU with partial pivoting,
// cross-checked against the closed-form product formula for this
// constant-off-diagonal structure; disagreement beyond 1e-8 relative is an
// internal-consistency error. Returns the LU values.
std::vector<double> leading_minors(const Eigen::MatrixXd& B, const ValidatedParams& p);
std::vector<double> leading_minors_closed_form(const Eigen::MatrixXd& B,
                                               const ValidatedParams& p);

struct DominanceVector {
    std::vector<double> d;    // 2K positive weights
    std::vector<double> eps;  // slack of the K reduced inequalities
};

// Positive d with |J_ii| d_i > sum_{j != i} |J_ij| d_j at the steady state:
// d_{1..K} = B^{-1} 1 (rescaled to min 1), then d_{K+i} placed inside its
// admissible interval with relative offset eps_frac.
DominanceVector dominance_vector(const SteadyState& s, const ValidatedParams& p,
                                 double eps_frac = 0.5);

// The weighted row-dominance test itself (d indexes columns).
bool is_generalized_row_dominant(const Eigen::MatrixXd& J, const std::vector<double>& d);

// Spectrum via the dense QR-based solver, sorted by ascending real part.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& J);

enum class Verdict { stable, inconclusive };

struct StabilityCertificate {
    SteadyState steady_state;
    std::vector<double> minors;
    std::vector<double> d;
    std::vector<std::complex<double>> spectrum;
    bool minors_positive = false;
    bool dominance_ok = false;
    bool spectrum_negative = false;
    double max_real_part = 0.0;
    Verdict verdict = Verdict::inconclusive;
    std::string note;
};

// Composes solve -> B -> minors -> d -> Jacobian -> spectrum. Verdict
// "stable" requires the constructive certificate AND the spectral test.
StabilityCertificate stability_certificate(const ValidatedParams& p);
StabilityCertificate stability_certificate(const ValidatedParams& p, const SteadyState& s);

}  // namespace darkmkt
