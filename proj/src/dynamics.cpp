#include "darkmkt/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace darkmkt {

std::vector<double> reduced_rhs(const ReducedState& x, const ValidatedParams& p) {
    const int K = p.K();
    std::vector<double> f(2 * static_cast<size_t>(K));
    double buyers = 0.0;
    for (int i = 0; i < K; ++i) buyers += x.buyer(i);
    for (int i = 0; i < K; ++i) {
        const double trade = p.lambda(i) * x.buyer(i) * x.seller(i);
        f[i] = -trade - p.gamma_tilde(i) * x.buyer(i) -
               p.gamma_tilde_u(i) * (buyers - x.buyer(i)) +
               p.gamma_tilde_u(i) * (1.0 - p.m_total());
        f[K + i] = -trade - p.gamma(i) * x.seller(i) + p.gamma_d(i) * p.m(i);
    }
    return f;
}

std::vector<double> full_rhs(const FullState& mu, const ValidatedParams& p) {
    const int K = p.K();
    std::vector<double> f(3 * static_cast<size_t>(K) + 1, 0.0);
    double& f_ln = f[3 * static_cast<size_t>(K)];
    for (int i = 0; i < K; ++i) {
        const double trade = p.lambda(i) * mu.mu_hn[i] * mu.mu_lo[i];
        f[i] = -trade + p.gamma_tilde_u(i) * mu.mu_ln - p.gamma_tilde_d(i) * mu.mu_hn[i];
        f[K + i] = -trade - p.gamma_u(i) * mu.mu_lo[i] + p.gamma_d(i) * mu.mu_ho[i];
        f[2 * K + i] = trade + p.gamma_u(i) * mu.mu_lo[i] - p.gamma_d(i) * mu.mu_ho[i];
        f_ln += trade - p.gamma_tilde_u(i) * mu.mu_ln + p.gamma_tilde_d(i) * mu.mu_hn[i];
    }
    return f;
}

namespace {

void check_box(const std::vector<double>& x, double t) {
    for (size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > -1e-9) || !(x[i] < 1.0 + 1e-6) || !std::isfinite(x[i])) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "blow-up: component %zu = %.6g left the unit box at t = %.6g",
                          i + 1, x[i], t);
            throw ConvergenceError(buf);
        }
    }
}

}  // namespace

Trajectory integrate(const ReducedState& x0, const ValidatedParams& p, double dt,
                     double t_max) {
    if (!(dt > 0.0)) throw ValidationError("integrate: dt must be > 0");
    if (!(t_max > 0.0)) throw ValidationError("integrate: t_max must be > 0");
    const size_t n = x0.x.size();
    if (static_cast<int>(n) != 2 * p.K())
        throw ValidationError("integrate: state dimension mismatch");

    Trajectory tr;
    tr.params_snapshot = p.raw();
    const long steps = static_cast<long>(std::ceil(t_max / dt - 1e-12));
    tr.times.reserve(steps + 1);
    tr.states.reserve(steps + 1);

    ReducedState x = x0;
    double t = 0.0;
    check_box(x.x, t);
    tr.times.push_back(t);
    tr.states.push_back(x);

    ReducedState tmp = x;
    for (long s = 0; s < steps; ++s) {
        const std::vector<double> k1 = reduced_rhs(x, p);
        for (size_t i = 0; i < n; ++i) tmp.x[i] = x.x[i] + 0.5 * dt * k1[i];
        const std::vector<double> k2 = reduced_rhs(tmp, p);
        for (size_t i = 0; i < n; ++i) tmp.x[i] = x.x[i] + 0.5 * dt * k2[i];
        const std::vector<double> k3 = reduced_rhs(tmp, p);
        for (size_t i = 0; i < n; ++i) tmp.x[i] = x.x[i] + dt * k3[i];
        const std::vector<double> k4 = reduced_rhs(tmp, p);
        for (size_t i = 0; i < n; ++i)
            x.x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t = dt * static_cast<double>(s + 1);
        check_box(x.x, t);
        tr.times.push_back(t);
        tr.states.push_back(x);
    }
    return tr;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    const int K = tr.states.empty() ? 0 : tr.states.front().K();
    os << "t";
    for (int i = 0; i < K; ++i) os << ",mu_h" << (i + 1) << "n";
    for (int i = 0; i < K; ++i) os << ",mu_l" << (i + 1) << "o";
    os << "\n";
    char buf[32];
    for (size_t s = 0; s < tr.times.size(); ++s) {
        std::snprintf(buf, sizeof(buf), "%.12g", tr.times[s]);
        os << buf;
        for (double v : tr.states[s].x) {
            std::snprintf(buf, sizeof(buf), "%.12g", v);
            os << ',' << buf;
        }
        os << "\n";
    }
}

}  // namespace darkmkt
