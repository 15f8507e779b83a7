#include "darkmkt/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace darkmkt {

PricingIntermediates intermediates(const ValidatedParams& p, const ReducedState& x) {
    const int K = p.K();
    if (x.K() != K) throw ValidationError("intermediates: state dimension mismatch");
    PricingIntermediates im;
    im.a.resize(K);
    im.d.resize(K);
    im.b.resize(K);
    im.c.resize(K);
    im.rho.resize(K);
    im.Psi.resize(K);
    im.Gamma.resize(K);
    im.Lambda.resize(K);
    im.Omega.resize(K);
    const double q = p.q(), r = p.r();
    double num = 0.0, den = r;
    for (int i = 0; i < K; ++i) {
        im.a[i] = p.lambda(i) * x.seller(i);
        im.d[i] = p.lambda(i) * x.buyer(i);
        if (im.a[i] < 1e-14 || im.d[i] < 1e-14)
            throw ValidationError("singular market: lambda * mass below 1e-14 for asset " +
                                  std::to_string(i + 1));
        im.b[i] = p.gamma_tilde_d(i) + r + im.a[i];
        im.c[i] = p.gamma_u(i) + r + im.d[i];
        im.rho[i] = p.gamma_d(i) + r;
        const double front = 1.0 + (p.gamma(i) + r) / (q * im.d[i]);
        im.Psi[i] = front * (1.0 + p.gamma_tilde_d(i) / ((1.0 - q) * im.a[i])) - 1.0;
        im.Gamma[i] = front * (1.0 + (p.gamma_tilde_d(i) + r) / ((1.0 - q) * im.a[i])) - 1.0;
        im.Lambda[i] = im.Psi[i] / im.Gamma[i];
        im.Omega[i] = p.delta_d(i) / (q * im.d[i] * im.Gamma[i]);
        num += p.gamma_tilde_u(i) * im.Omega[i];
        den += p.gamma_tilde_u(i) * (1.0 - im.Lambda[i]);
    }
    im.Theta = num / den;
    return im;
}

ValueFunctions value_functions_closed(const ValidatedParams& p, const ReducedState& x) {
    const PricingIntermediates im = intermediates(p, x);
    const int K = p.K();
    const double q = p.q(), r = p.r();
    ValueFunctions vf;
    vf.x.resize(K);
    vf.y.resize(K);
    vf.z.resize(K);
    vf.w = im.Theta;
    for (int i = 0; i < K; ++i) {
        const double oma = (1.0 - q) * im.a[i];
        vf.x[i] = im.Lambda[i] * im.Theta + im.Omega[i];
        vf.y[i] = im.rho[i] / (oma * im.Gamma[i]) * im.Theta + p.delta_h(i) / r -
                  (im.rho[i] / r) * im.Omega[i] * (p.gamma_tilde_d(i) + r + oma) / oma;
        vf.z[i] = (p.gamma_d(i) * vf.y[i] + p.delta_h(i)) / im.rho[i];
    }
    return vf;
}

ValueFunctions hjb_linear_solve(const ValidatedParams& p, const ReducedState& x) {
    const PricingIntermediates im = intermediates(p, x);
    const int K = p.K();
    const double q = p.q(), r = p.r();

    // unknown ordering: w, then (x_i, y_i, z_i) per asset
    const int n = 1 + 3 * K;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    const auto ix = [](int i) { return 1 + 3 * i; };

    double gtu_sum = 0.0;
    for (int i = 0; i < K; ++i) gtu_sum += p.gamma_tilde_u(i);
    A(0, 0) = r + gtu_sum;
    for (int i = 0; i < K; ++i) A(0, ix(i)) = -p.gamma_tilde_u(i);

    for (int i = 0; i < K; ++i) {
        const double a = im.a[i], d = im.d[i];
        const int rx = ix(i), ry = rx + 1, rz = rx + 2;
        // buyer row: (gtd + r + (1-q) a) x + (1-q) a y - (1-q) a z - (gtd + (1-q) a) w = 0
        A(rx, rx) = p.gamma_tilde_d(i) + r + (1.0 - q) * a;
        A(rx, ry) = (1.0 - q) * a;
        A(rx, rz) = -(1.0 - q) * a;
        A(rx, 0) = -(p.gamma_tilde_d(i) + (1.0 - q) * a);
        // owner-high row: (gd + r) z - gd y = delta_h
        A(ry, rz) = im.rho[i];
        A(ry, ry + 0) = -p.gamma_d(i);
        rhs(ry) = p.delta_h(i);
        // seller row: q d x + (gu + r + q d) y - (gu + q d) z - q d w = delta_h - delta_d
        A(rz, rx) = q * d;
        A(rz, ry) = p.gamma_u(i) + r + q * d;
        A(rz, rz) = -(p.gamma_u(i) + q * d);
        A(rz, 0) = -q * d;
        rhs(rz) = p.delta_h(i) - p.delta_d(i);
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const Eigen::VectorXd v = lu.solve(rhs);
    if (!v.allFinite()) throw ConvergenceError("hjb_linear_solve: singular value system");
    const double scale = A.cwiseAbs().rowwise().sum().maxCoeff() * v.cwiseAbs().maxCoeff() +
                         rhs.cwiseAbs().maxCoeff();
    const double res = (A * v - rhs).cwiseAbs().maxCoeff();
    if (!(res < 1e-10 * scale))
        throw ConvergenceError("hjb_linear_solve: residual above 1e-10 * scale");

    ValueFunctions vf;
    vf.w = v(0);
    vf.x.resize(K);
    vf.y.resize(K);
    vf.z.resize(K);
    for (int i = 0; i < K; ++i) {
        vf.x[i] = v(ix(i));
        vf.y[i] = v(ix(i) + 1);
        vf.z[i] = v(ix(i) + 2);
    }
    return vf;
}

ReservationValues reservation_values(const ValueFunctions& vf) {
    ReservationValues rv;
    const size_t K = vf.x.size();
    rv.delta_l.resize(K);
    rv.delta_h.resize(K);
    for (size_t i = 0; i < K; ++i) {
        rv.delta_l[i] = vf.y[i] - vf.w;
        rv.delta_h[i] = vf.z[i] - vf.x[i];
    }
    return rv;
}

ReservationValues reservation_values_closed(const ValidatedParams& p, const ReducedState& x) {
    const PricingIntermediates im = intermediates(p, x);
    const int K = p.K();
    const double q = p.q(), r = p.r();
    ReservationValues rv;
    rv.delta_l.resize(K);
    rv.delta_h.resize(K);
    for (int i = 0; i < K; ++i) {
        const double oma = (1.0 - q) * im.a[i];
        const double bq = p.gamma_tilde_d(i) + r + oma;  // b_i - q a_i
        const double y_slope = im.rho[i] / (oma * im.Gamma[i]);
        const double y_inter = p.delta_h(i) / r - (im.rho[i] / r) * im.Omega[i] * bq / oma;
        rv.delta_l[i] = (y_slope - 1.0) * im.Theta + y_inter;
        const double gd = p.gamma_d(i);
        // z - x = (gd y + delta_h)/rho - (Lambda Theta + Omega)
        rv.delta_h[i] = (gd * y_slope / im.rho[i] - im.Lambda[i]) * im.Theta +
                        (gd * y_inter + p.delta_h(i)) / im.rho[i] - im.Omega[i];
    }
    return rv;
}

PriceReport equilibrium_prices(const ValidatedParams& p, const ReducedState& x,
                               double days_per_year) {
    const PricingIntermediates im = intermediates(p, x);
    const int K = p.K();
    const double q = p.q(), r = p.r();
    const ReservationValues rv = reservation_values_closed(p, x);

    PriceReport rep;
    rep.delta_l = rv.delta_l;
    rep.delta_h = rv.delta_h;
    rep.price.resize(K);
    rep.price_bargain.resize(K);
    rep.price_display.resize(K);
    rep.display_deviates.resize(K);
    for (int i = 0; i < K; ++i) {
        const double oma = (1.0 - q) * im.a[i];
        const double bq = p.gamma_tilde_d(i) + r + oma;
        const double kappa = p.gamma_d(i) + (1.0 - q) * r;
        // closed-form assembly of (1-q) dl + q dh
        const double slope = kappa / (oma * im.Gamma[i]) - (1.0 - q) - q * im.Lambda[i];
        const double inter =
            p.delta_h(i) / r - im.Omega[i] * (kappa * bq / (r * oma) + q);
        rep.price[i] = slope * im.Theta + inter;
        rep.price_bargain[i] = (1.0 - q) * rv.delta_l[i] + q * rv.delta_h[i];
        // published display, verbatim
        rep.price_display[i] =
            (p.gamma_d(i) / (oma * im.Gamma[i]) - im.Lambda[i]) * im.Theta +
            p.delta_h(i) / r -
            q * im.Omega[i] *
                (1.0 + (1.0 - r + p.gamma_d(i) / q) * (1.0 + p.gamma_tilde_d(i) / oma));
        rep.display_deviates[i] =
            std::abs(rep.price_display[i] - rep.price[i]) > 1e-9 * std::abs(rep.price[i]);
    }
    const SellerTiming st = seller_timing(p, x, days_per_year);
    rep.timing_days = st.days;
    rep.timing_infinite = st.infinite;
    rep.min_timing_days = st.min_days;
    rep.max_timing_days = st.max_days;
    rep.q_effective = effective_bargaining_power(q, p, x);
    return rep;
}

double effective_bargaining_power(double q_hat, const ValidatedParams& p,
                                  const ReducedState& x) {
    if (!(q_hat >= 0.0 && q_hat <= 1.0))
        throw ValidationError("effective_bargaining_power: q_hat outside [0,1]");
    const int K = p.K();
    double acc = 0.0;
    for (int i = 0; i < K; ++i) {
        const double base = p.r() + p.gamma(i) + p.gamma_tilde(i);
        const double seller_side = q_hat * (base + p.lambda(i) * x.seller(i));
        const double buyer_side = (1.0 - q_hat) * (base + p.lambda(i) * x.buyer(i));
        acc += seller_side / (seller_side + buyer_side);
    }
    return acc / K;
}

SellerTiming seller_timing(const ValidatedParams& p, const ReducedState& x,
                           double days_per_year) {
    const int K = p.K();
    SellerTiming st;
    st.days.resize(K);
    st.infinite.resize(K);
    double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
    for (int i = 0; i < K; ++i) {
        const double rate = p.lambda(i) * x.buyer(i);
        if (rate < 1e-300) {
            st.days[i] = std::numeric_limits<double>::infinity();
            st.infinite[i] = true;
        } else {
            st.days[i] = days_per_year / rate;
            st.infinite[i] = false;
        }
        mn = std::min(mn, st.days[i]);
        mx = std::max(mx, st.days[i]);
    }
    st.min_days = mn;
    st.max_days = mx;
    return st;
}

}  // namespace darkmkt
