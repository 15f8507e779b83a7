#include "darkmkt/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <Eigen/Dense>

#include "darkmkt/dynamics.hpp"

namespace darkmkt {

double seller_mass_at_steady(double buyer_mass, const ValidatedParams& p, int i) {
    return p.gamma_d(i) * p.m(i) / (p.lambda(i) * buyer_mass + p.gamma(i));
}

namespace {

// K-dimensional residual in the buyer masses after eliminating sellers.
Eigen::VectorXd buyer_residual(const Eigen::VectorXd& b, const ValidatedParams& p) {
    const int K = p.K();
    double sum = b.sum();
    Eigen::VectorXd g(K);
    for (int i = 0; i < K; ++i) {
        const double w = seller_mass_at_steady(b[i], p, i);
        g[i] = -p.lambda(i) * b[i] * w - p.gamma_tilde(i) * b[i] -
               p.gamma_tilde_u(i) * (sum - b[i]) + p.gamma_tilde_u(i) * (1.0 - p.m_total());
    }
    return g;
}

Eigen::MatrixXd buyer_jacobian(const Eigen::VectorXd& b, const ValidatedParams& p) {
    const int K = p.K();
    Eigen::MatrixXd J(K, K);
    for (int i = 0; i < K; ++i) {
        for (int j = 0; j < K; ++j) J(i, j) = -p.gamma_tilde_u(i);
        const double denom = p.lambda(i) * b[i] + p.gamma(i);
        const double w = p.gamma_d(i) * p.m(i) / denom;
        J(i, i) = -p.lambda(i) * w * p.gamma(i) / denom - p.gamma_tilde(i);
    }
    return J;
}

bool buyer_feasible(const Eigen::VectorXd& b, const ValidatedParams& p) {
    if ((b.array() <= 0.0).any()) return false;
    return b.sum() < 1.0 - p.m_total();
}

SteadyState pack_solution(const Eigen::VectorXd& b, const ValidatedParams& p, int iters,
                          const std::string& method) {
    const int K = p.K();
    SteadyState s;
    s.x = make_reduced(K);
    for (int i = 0; i < K; ++i) {
        s.x.buyer(i) = b[i];
        s.x.seller(i) = seller_mass_at_steady(b[i], p, i);
    }
    const std::vector<double> f = reduced_rhs(s.x, p);
    double res = 0.0;
    for (double v : f) res = std::max(res, std::abs(v));
    s.residual = res;
    s.iterations = iters;
    s.method = method;
    return s;
}

std::string iterate_string(const Eigen::VectorXd& b) {
    std::string s = "(";
    char buf[32];
    for (int i = 0; i < b.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.6g", b[i]);
        s += buf;
        if (i + 1 < b.size()) s += ", ";
    }
    return s + ")";
}

// Newton iteration; returns true on convergence.
bool newton(Eigen::VectorXd& b, const ValidatedParams& p, double tol, int max_iters,
            int& iters_used) {
    for (int it = 0; it < max_iters; ++it) {
        const Eigen::VectorXd g = buyer_residual(b, p);
        const double res = g.lpNorm<Eigen::Infinity>();
        if (res < tol) {
            iters_used += it;
            return true;
        }
        Eigen::VectorXd step = buyer_jacobian(b, p).partialPivLu().solve(-g);
        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            const Eigen::VectorXd cand = b + t * step;
            if (buyer_feasible(cand, p) &&
                buyer_residual(cand, p).lpNorm<Eigen::Infinity>() < res) {
                b = cand;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            iters_used += it;
            return false;  // stalled
        }
    }
    iters_used += max_iters;
    return buyer_residual(b, p).lpNorm<Eigen::Infinity>() < tol;
}

// Damped iteration of the scalar fixed-point map
//   x_i <- [gtu_i(1-m) - gd_i m_i + g_i gd_i m_i/(lambda_i x_i + g_i)
//           - gtu_i sum_{j!=i} x_j] / gt_i
void damped_fixed_point(Eigen::VectorXd& b, const ValidatedParams& p, int iters,
                        double omega) {
    const int K = p.K();
    const double cap = 1.0 - p.m_total();
    for (int it = 0; it < iters; ++it) {
        const double sum = b.sum();
        Eigen::VectorXd nb(K);
        for (int i = 0; i < K; ++i) {
            const double rhs = p.gamma_tilde_u(i) * (1.0 - p.m_total()) -
                               p.gamma_d(i) * p.m(i) +
                               p.gamma(i) * p.gamma_d(i) * p.m(i) /
                                   (p.lambda(i) * b[i] + p.gamma(i)) -
                               p.gamma_tilde_u(i) * (sum - b[i]);
            nb[i] = (1.0 - omega) * b[i] + omega * rhs / p.gamma_tilde(i);
            nb[i] = std::clamp(nb[i], 1e-12, cap * (1.0 - 1e-12));
        }
        b = nb;
    }
}

}  // namespace

SteadyState solve_steady_state(const ValidatedParams& p, std::optional<ReducedState> x0,
                               double tol) {
    const int K = p.K();
    Eigen::VectorXd b(K);
    if (x0) {
        if (x0->K() != K) throw ValidationError("solve_steady_state: x0 dimension mismatch");
        for (int i = 0; i < K; ++i) b[i] = x0->buyer(i);
        if (!buyer_feasible(b, p))
            throw ValidationError("solve_steady_state: x0 outside the feasible box");
    } else {
        for (int i = 0; i < K; ++i)
            b[i] = p.gamma_tilde_u(i) * (1.0 - p.m_total()) / p.gamma_tilde(i);
        // keep the default start strictly inside the box
        const double cap = 1.0 - p.m_total();
        if (b.sum() >= cap) b *= 0.9 * cap / b.sum();
    }

    int iters = 0;
    if (newton(b, p, tol, 200, iters)) return pack_solution(b, p, iters, "newton");

    damped_fixed_point(b, p, 2000, 0.5);
    iters += 2000;
    if (newton(b, p, tol, 200, iters))
        return pack_solution(b, p, iters, "newton+fixed-point");

    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", buyer_residual(b, p).lpNorm<Eigen::Infinity>());
    throw ConvergenceError("steady-state solver did not reach tol; last iterate " +
                           iterate_string(b) + ", residual " + buf);
}

namespace {

// polynomial helpers on coefficient arrays, ascending order
std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

std::vector<double> poly_add(std::vector<double> a, const std::vector<double>& b) {
    if (b.size() > a.size()) a.resize(b.size(), 0.0);
    for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return a;
}

std::vector<double> poly_scale(std::vector<double> a, double s) {
    for (double& v : a) v *= s;
    return a;
}

}  // namespace

QuarticCoeffs k2_quartic(const ValidatedParams& p) {
    if (p.K() != 2) throw ValidationError("k2_quartic: only supported for K = 2");

    // Asset 1 scalar steady equation solved for y = mu(h2,n):
    //   gt1 x + gtu1 y = C1 + T1/(lam1 x + g1)
    //   => y = N(x)/D(x),  N quadratic, D(x) = gtu1 (lam1 x + g1)
    const double C1 = p.gamma_tilde_u(0) * (1.0 - p.m_total()) - p.gamma_d(0) * p.m(0);
    const double T1 = p.gamma(0) * p.gamma_d(0) * p.m(0);
    const double C2 = p.gamma_tilde_u(1) * (1.0 - p.m_total()) - p.gamma_d(1) * p.m(1);
    const double T2 = p.gamma(1) * p.gamma_d(1) * p.m(1);

    const std::vector<double> L1 = {p.gamma(0), p.lambda(0)};  // lam1 x + g1
    // N = C1*L1 + T1 - gt1 x * L1
    std::vector<double> N = poly_add(poly_scale(L1, C1), {T1});
    N = poly_add(N, poly_mul({0.0, -p.gamma_tilde(0)}, L1));
    const std::vector<double> D = poly_scale(L1, p.gamma_tilde_u(0));

    // Asset 2 equation (gt2 y + gtu2 x - C2)(lam2 y + g2) = T2, y = N/D:
    //   (gt2 N + (gtu2 x - C2) D)(lam2 N + g2 D) - T2 D^2 = 0
    const std::vector<double> S1 =
        poly_add(poly_scale(N, p.gamma_tilde(1)), poly_mul({-C2, p.gamma_tilde_u(1)}, D));
    const std::vector<double> S2 = poly_add(poly_scale(N, p.lambda(1)), poly_scale(D, p.gamma(1)));
    std::vector<double> q = poly_add(poly_mul(S1, S2), poly_scale(poly_mul(D, D), -T2));

    q.resize(5, 0.0);
    double maxabs = 0.0;
    for (double v : q) maxabs = std::max(maxabs, std::abs(v));
    if (!(std::abs(q[4]) > 1e-12 * maxabs))
        throw ValidationError("k2_quartic: degenerate parameters, leading coefficient vanishes");

    QuarticCoeffs c;
    for (int k = 0; k < 5; ++k) c.coeff[k] = q[4 - k];
    return c;
}

double quartic_eval(const QuarticCoeffs& c, double x) {
    double v = 0.0;
    for (double ck : c.coeff) v = v * x + ck;
    return v;
}

std::vector<double> quartic_real_roots(const QuarticCoeffs& c) {
    Eigen::Matrix4d comp = Eigen::Matrix4d::Zero();
    for (int k = 0; k < 4; ++k) comp(0, k) = -c.coeff[k + 1] / c.coeff[0];
    comp(1, 0) = comp(2, 1) = comp(3, 2) = 1.0;
    const Eigen::Vector4cd ev = comp.eigenvalues();
    std::vector<double> roots;
    for (int k = 0; k < 4; ++k) {
        if (std::abs(ev[k].imag()) < 1e-9 * (1.0 + std::abs(ev[k].real())))
            roots.push_back(ev[k].real());
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

double quartic_positive_root(const QuarticCoeffs& c, double lo, double hi) {
    const std::vector<double> all = quartic_real_roots(c);
    std::vector<double> inside;
    for (double rt : all)
        if (rt > lo && rt < hi) inside.push_back(rt);
    if (inside.size() != 1) {
        std::string msg = "quartic has " + std::to_string(inside.size()) + " roots in (" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "); real roots:";
        char buf[32];
        for (double rt : all) {
            std::snprintf(buf, sizeof(buf), " %.9g", rt);
            msg += buf;
        }
        throw ValidationError(msg);
    }

    // bracket by sign-change scan, then bisection + Newton polish
    const int cells = 4096;
    double a = lo, b = hi, fa = quartic_eval(c, a);
    double la = a;
    bool bracketed = false;
    for (int k = 1; k <= cells; ++k) {
        const double t = lo + (hi - lo) * static_cast<double>(k) / cells;
        const double ft = quartic_eval(c, t);
        if (fa == 0.0) return la;
        if ((fa < 0.0) != (ft < 0.0)) {
            a = la;
            b = t;
            bracketed = true;
            break;
        }
        la = t;
        fa = ft;
    }
    if (!bracketed) throw ConvergenceError("quartic root: no sign change found in window");
    for (int it = 0; it < 200 && (b - a) > 1e-14; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = quartic_eval(c, mid);
        if ((fm < 0.0) == (quartic_eval(c, a) < 0.0))
            a = mid;
        else
            b = mid;
    }
    double x = 0.5 * (a + b);
    for (int it = 0; it < 40; ++it) {
        const double f = quartic_eval(c, x);
        const double df = ((4.0 * c.coeff[0] * x + 3.0 * c.coeff[1]) * x + 2.0 * c.coeff[2]) * x +
                          c.coeff[3];
        if (df == 0.0) break;
        const double nx = x - f / df;
        if (std::abs(nx - x) < 1e-15 * std::max(1.0, std::abs(x))) {
            x = nx;
            break;
        }
        x = nx;
    }
    return x;
}

UniquenessReport verify_uniqueness_scan(const ValidatedParams& p, int n_starts,
                                        unsigned long long seed) {
    const int K = p.K();
    const double cap = 1.0 - p.m_total();
    std::mt19937_64 rng(seed);

    // Latin hypercube over (0, cap)^K, then scale rows that exceed the simplex.
    std::vector<std::vector<int>> perms(K, std::vector<int>(n_starts));
    for (int d = 0; d < K; ++d) {
        for (int s = 0; s < n_starts; ++s) perms[d][s] = s;
        std::shuffle(perms[d].begin(), perms[d].end(), rng);
    }
    std::uniform_real_distribution<double> unif(0.05, 0.95);

    UniquenessReport rep;
    rep.n_starts = n_starts;
    std::vector<Eigen::VectorXd> sols;
    for (int s = 0; s < n_starts; ++s) {
        ReducedState x0 = make_reduced(K);
        double sum = 0.0;
        for (int d = 0; d < K; ++d) {
            x0.buyer(d) = cap * (perms[d][s] + unif(rng)) / n_starts;
            sum += x0.buyer(d);
        }
        if (sum >= cap) {
            for (int d = 0; d < K; ++d) x0.buyer(d) *= 0.9 * cap / sum;
        }
        for (int d = 0; d < K; ++d) x0.seller(d) = seller_mass_at_steady(x0.buyer(d), p, d);
        try {
            const SteadyState st = solve_steady_state(p, x0);
            Eigen::VectorXd v(2 * K);
            for (int i = 0; i < 2 * K; ++i) v[i] = st.x.x[i];
            sols.push_back(v);
            rep.representative = st.x;
            ++rep.n_converged;
        } catch (const ConvergenceError&) {
            ++rep.n_failed;
        }
    }
    // cluster at 1e-8
    std::vector<Eigen::VectorXd> centers;
    for (const auto& v : sols) {
        bool found = false;
        for (const auto& cent : centers) {
            if ((v - cent).lpNorm<Eigen::Infinity>() < 1e-8) {
                found = true;
                break;
            }
        }
        if (!found) centers.push_back(v);
    }
    for (const auto& a : sols)
        for (const auto& b : sols)
            rep.max_pairwise_spread =
                std::max(rep.max_pairwise_spread, (a - b).lpNorm<Eigen::Infinity>());
    rep.n_clusters = static_cast<int>(centers.size());
    return rep;
}

}  // namespace darkmkt
