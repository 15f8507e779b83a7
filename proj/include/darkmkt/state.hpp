#pragma once

#include <vector>

#include "darkmkt/params.hpp"

namespace darkmkt {

// The 2K free coordinates after eliminating the K+1 conservation constraints:
// x[i] = mu(hi,n) (buyers), x[K+i] = mu(li,o) (sellers), 0-based i.
struct ReducedState {
    std::vector<double> x;

    int K() const { return static_cast<int>(x.size()) / 2; }
    double buyer(int i) const { return x[i]; }
    double seller(int i) const { return x[K() + i]; }
    double& buyer(int i) { return x[i]; }
    double& seller(int i) { return x[K() + i]; }
};

// All 3K+1 occupation measures.
struct FullState {
    std::vector<double> mu_hn;  // high-type non-owner committed to asset i
    std::vector<double> mu_lo;  // low-type owner of asset i
    std::vector<double> mu_ho;  // high-type owner of asset i
    double mu_ln = 0.0;         // pooled low-type non-owner
};

ReducedState make_reduced(int K);

// Feasibility of a reduced state: x >= 0, seller masses <= m_i, and the
// implied mu(l,n) = 1 - m - sum of buyer masses >= 0. Slack allows for
// integrator drift.
bool reduced_feasible(const ReducedState& x, const ValidatedParams& p, double slack = 0.0);

// mu_ho[i] = m_i - x[K+i], mu_ln = 1 - m - sum x[i]. Throws ValidationError
// naming the offending component when x is out of range.
FullState reduced_to_full(const ReducedState& x, const ValidatedParams& p);

// Extracts (mu_hn, mu_lo); rejects inputs violating the conservation
// constraints by more than 1e-12.
ReducedState full_to_reduced(const FullState& mu, const ValidatedParams& p);

}  // namespace darkmkt
