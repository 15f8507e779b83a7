#include "darkmkt/stability.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace darkmkt {

Eigen::MatrixXd jacobian(const ReducedState& x, const ValidatedParams& p) {
    const int K = p.K();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * K, 2 * K);
    for (int i = 0; i < K; ++i) {
        for (int j = 0; j < K; ++j) J(i, j) = -p.gamma_tilde_u(i);
        J(i, i) = -p.lambda(i) * x.seller(i) - p.gamma_tilde(i);
        J(i, K + i) = -p.lambda(i) * x.buyer(i);
        J(K + i, i) = -p.lambda(i) * x.seller(i);
        J(K + i, K + i) = -p.lambda(i) * x.buyer(i) - p.gamma(i);
    }
    return J;
}

double b_diag_entry(double seller_mass, const ValidatedParams& p, int i) {
    return p.gamma_tilde(i) +
           p.lambda(i) * p.gamma(i) / (p.gamma_d(i) * p.m(i)) * seller_mass * seller_mass;
}

Eigen::MatrixXd b_matrix(const SteadyState& s, const ValidatedParams& p) {
    if (!(s.residual <= 1e-8))
        throw ValidationError("b_matrix: input is not a steady state (residual " +
                              std::to_string(s.residual) + " > 1e-8)");
    const int K = p.K();
    Eigen::MatrixXd B(K, K);
    for (int i = 0; i < K; ++i) {
        for (int j = 0; j < K; ++j) B(i, j) = -p.gamma_tilde_u(i);
        B(i, i) = b_diag_entry(s.x.seller(i), p, i);
    }
    return B;
}

std::vector<double> leading_minors_closed_form(const Eigen::MatrixXd& B,
                                               const ValidatedParams& p) {
    // Factor gamma_tilde_ui out of row i; the rest is diag(1+c) - ones:
    //   det = prod gtu_j * prod (1+c_j) * (1 - sum 1/(1+c_j)),  c_j = b_jj/gtu_j
    const int K = static_cast<int>(B.rows());
    std::vector<double> out(K);
    double prod = 1.0, sum = 0.0;
    for (int pidx = 0; pidx < K; ++pidx) {
        const double gtu = p.gamma_tilde_u(pidx);
        const double c = B(pidx, pidx) / gtu;
        prod *= gtu * (1.0 + c);
        sum += 1.0 / (1.0 + c);
        out[pidx] = prod * (1.0 - sum);
    }
    return out;
}

std::vector<double> leading_minors(const Eigen::MatrixXd& B, const ValidatedParams& p) {
    const int K = static_cast<int>(B.rows());
    std::vector<double> lu(K);
    for (int pidx = 1; pidx <= K; ++pidx) {
        lu[pidx - 1] = B.topLeftCorner(pidx, pidx).partialPivLu().determinant();
    }
    const std::vector<double> cf = leading_minors_closed_form(B, p);
    for (int i = 0; i < K; ++i) {
        const double scale = std::max({std::abs(lu[i]), std::abs(cf[i]), 1e-300});
        if (std::abs(lu[i] - cf[i]) > 1e-8 * scale)
            throw ConvergenceError(
                "leading_minors: LU and closed-form determinants disagree at p = " +
                std::to_string(i + 1));
    }
    return lu;
}

bool is_generalized_row_dominant(const Eigen::MatrixXd& J, const std::vector<double>& d) {
    const int n = static_cast<int>(J.rows());
    for (int i = 0; i < n; ++i) {
        double off = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) off += std::abs(J(i, j)) * d[j];
        if (!(std::abs(J(i, i)) * d[i] > off)) return false;
    }
    return true;
}

DominanceVector dominance_vector(const SteadyState& s, const ValidatedParams& p,
                                 double eps_frac) {
    if (!(eps_frac > 0.0 && eps_frac < 1.0))
        throw ValidationError("dominance_vector: eps_frac must be in (0,1)");
    const int K = p.K();
    const Eigen::MatrixXd B = b_matrix(s, p);
    const std::vector<double> minors = leading_minors(B, p);
    for (int i = 0; i < K; ++i)
        if (!(minors[i] > 0.0))
            throw ValidationError("dominance_vector: leading minor " + std::to_string(i + 1) +
                                  " is not positive");

    Eigen::VectorXd dk = B.partialPivLu().solve(Eigen::VectorXd::Ones(K));
    const double mn = dk.minCoeff();
    if (!(mn > 0.0))
        throw ConvergenceError("dominance_vector: B^-1 1 not positive despite positive minors");
    dk /= mn;

    DominanceVector dv;
    dv.d.assign(2 * K, 0.0);
    dv.eps.assign(K, 0.0);
    for (int i = 0; i < K; ++i) dv.d[i] = dk[i];

    for (int i = 0; i < K; ++i) {
        const double xi = s.x.buyer(i), wi = s.x.seller(i);
        const double lam = p.lambda(i), g = p.gamma(i);
        double cross = 0.0;
        for (int j = 0; j < K; ++j)
            if (j != i) cross += dk[j] * p.gamma_tilde_u(i);
        const double eps = dk[i] * (lam * wi + p.gamma_tilde(i)) - cross -
                           dk[i] * lam * lam * xi * wi / (lam * xi + g);
        dv.eps[i] = eps;
        if (!(eps > 0.0))
            throw ConvergenceError("dominance_vector: slack eps non-positive for asset " +
                                   std::to_string(i + 1));
        if (lam * xi < 1e-14) {
            // row K+i reads gamma_i d_{K+i} > lambda_i w_i d_i; row i is free of d_{K+i}
            dv.d[K + i] = dk[i] * (1.0 + lam * wi / g);
        } else {
            // admissible interval (base, base + eps/(lambda_i x_i)), base from row K+i
            const double base = dk[i] * lam * wi / (lam * xi + g);
            dv.d[K + i] = base + eps_frac * eps / (lam * xi);
        }
    }

    const Eigen::MatrixXd J = jacobian(s.x, p);
    if (!is_generalized_row_dominant(J, dv.d))
        throw ConvergenceError("dominance_vector: constructed d fails the strict dominance test");
    return dv;
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& J) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(J, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("eigenvalues: QR iteration did not converge");
    std::vector<std::complex<double>> ev(J.rows());
    for (int i = 0; i < J.rows(); ++i) ev[i] = es.eigenvalues()[i];
    std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return ev;
}

StabilityCertificate stability_certificate(const ValidatedParams& p, const SteadyState& s) {
    StabilityCertificate cert;
    cert.steady_state = s;

    const Eigen::MatrixXd J = jacobian(s.x, p);
    cert.spectrum = eigenvalues(J);
    cert.max_real_part = cert.spectrum.back().real();
    cert.spectrum_negative = cert.max_real_part < 0.0;

    try {
        const Eigen::MatrixXd B = b_matrix(s, p);
        cert.minors = leading_minors(B, p);
        cert.minors_positive = true;
        for (double mval : cert.minors)
            if (!(mval > 0.0)) cert.minors_positive = false;
        if (cert.minors_positive) {
            const DominanceVector dv = dominance_vector(s, p);
            cert.d = dv.d;
            cert.dominance_ok = is_generalized_row_dominant(J, dv.d);
        }
    } catch (const std::runtime_error& e) {
        cert.note = e.what();
    }

    cert.verdict = (cert.minors_positive && cert.dominance_ok && cert.spectrum_negative)
                       ? Verdict::stable
                       : Verdict::inconclusive;
    return cert;
}

StabilityCertificate stability_certificate(const ValidatedParams& p) {
    return stability_certificate(p, solve_steady_state(p));
}

}  // namespace darkmkt
