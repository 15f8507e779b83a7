#include "darkmkt/state.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace darkmkt {

ReducedState make_reduced(int K) {
    ReducedState s;
    s.x.assign(2 * static_cast<size_t>(K), 0.0);
    return s;
}

bool reduced_feasible(const ReducedState& x, const ValidatedParams& p, double slack) {
    if (x.K() != p.K()) return false;
    double buyers = 0.0;
    for (int i = 0; i < p.K(); ++i) {
        if (x.buyer(i) < -slack) return false;
        if (x.seller(i) < -slack || x.seller(i) > p.m(i) + slack) return false;
        buyers += x.buyer(i);
    }
    return 1.0 - p.m_total() - buyers >= -slack;
}

FullState reduced_to_full(const ReducedState& x, const ValidatedParams& p) {
    if (x.K() != p.K()) throw ValidationError("reduced state has wrong dimension");
    const int K = p.K();
    FullState f;
    f.mu_hn.resize(K);
    f.mu_lo.resize(K);
    f.mu_ho.resize(K);
    double buyers = 0.0;
    for (int i = 0; i < K; ++i) {
        if (x.buyer(i) < 0.0)
            throw ValidationError("mu(h" + std::to_string(i + 1) + ",n) negative");
        if (x.seller(i) < 0.0 || x.seller(i) > p.m(i))
            throw ValidationError("mu(l" + std::to_string(i + 1) + ",o) outside [0, m_" +
                                  std::to_string(i + 1) + "]");
        f.mu_hn[i] = x.buyer(i);
        f.mu_lo[i] = x.seller(i);
        f.mu_ho[i] = p.m(i) - x.seller(i);
        buyers += x.buyer(i);
    }
    f.mu_ln = 1.0 - p.m_total() - buyers;
    if (f.mu_ln < 0.0) throw ValidationError("sum of buyer masses exceeds 1 - m");
    return f;
}

ReducedState full_to_reduced(const FullState& mu, const ValidatedParams& p) {
    const int K = p.K();
    if (static_cast<int>(mu.mu_hn.size()) != K || static_cast<int>(mu.mu_lo.size()) != K ||
        static_cast<int>(mu.mu_ho.size()) != K)
        throw ValidationError("full state has wrong dimension");

    constexpr double tol = 1e-12;
    double total = mu.mu_ln;
    for (int i = 0; i < K; ++i) {
        if (std::abs(mu.mu_ho[i] + mu.mu_lo[i] - p.m(i)) > tol)
            throw ValidationError("owner mass of asset " + std::to_string(i + 1) +
                                  " does not sum to m");
        if (mu.mu_hn[i] < -tol || mu.mu_lo[i] < -tol || mu.mu_ho[i] < -tol)
            throw ValidationError("negative occupation measure for asset " +
                                  std::to_string(i + 1));
        total += p.m(i) + mu.mu_hn[i];
    }
    if (mu.mu_ln < -tol) throw ValidationError("negative mu(l,n)");
    if (std::abs(total - 1.0) > tol)
        throw ValidationError("occupation measures do not sum to 1");

    ReducedState x = make_reduced(K);
    for (int i = 0; i < K; ++i) {
        x.buyer(i) = mu.mu_hn[i];
        x.seller(i) = mu.mu_lo[i];
    }
    return x;
}

}  // namespace darkmkt
