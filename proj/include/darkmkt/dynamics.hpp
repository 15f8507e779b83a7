#pragma once

#include <iosfwd>
#include <vector>

#include "darkmkt/state.hpp"

namespace darkmkt {

// Reduced vector field (2K components):
//   f[i]   = -lambda_i x_i x_{K+i} - gamma_tilde_i x_i
//            - gamma_tilde_ui sum_{j != i} x_j + gamma_tilde_ui (1 - m)
//   f[K+i] = -lambda_i x_i x_{K+i} - gamma_i x_{K+i} + gamma_di m_i
std::vector<double> reduced_rhs(const ReducedState& x, const ValidatedParams& p);

// Full vector field on the 3K+1 occupation measures, ordered
// (mu_hn[0..K), mu_lo[0..K), mu_ho[0..K), mu_ln). Conserves Eq-(6)/(7)
// linear functionals exactly.
std::vector<double> full_rhs(const FullState& mu, const ValidatedParams& p);

struct Trajectory {
    std::vector<double> times;
    std::vector<ReducedState> states;
    ModelParams params_snapshot;
};

// Classical fixed-step RK4. Samples every dt; final time >= t_max. Throws
// ConvergenceError("blow-up ...") with a time stamp if any component drops
// below -1e-9 or exceeds 1 + 1e-6.
Trajectory integrate(const ReducedState& x0, const ValidatedParams& p, double dt,
                     double t_max);

// CSV with header t,mu_h1n,...,mu_hKn,mu_l1o,...,mu_lKo
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

}  // namespace darkmkt
