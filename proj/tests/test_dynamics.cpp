#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "darkmkt/dynamics.hpp"
#include "darkmkt/equilibrium.hpp"
#include "darkmkt/reference_two_asset.hpp"

#include "support/random_params.hpp"
#include "support/sec5_truth.hpp"

using namespace darkmkt;

namespace {

ReducedState truth_state() {
    ReducedState x = make_reduced(2);
    for (int i = 0; i < 4; ++i) x.x[i] = testsupport::truth::x_star[i];
    return x;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double a : v) m = std::max(m, std::abs(a));
    return m;
}

}  // namespace

TEST_CASE("reduced field at the origin") {
    const ValidatedParams p = validate(reference::params());
    const std::vector<double> f = reduced_rhs(make_reduced(2), p);
    for (int i = 0; i < 2; ++i) {
        CHECK(f[i] == doctest::Approx(p.gamma_tilde_u(i) * 0.1).epsilon(1e-14));
        CHECK(f[2 + i] == doctest::Approx(p.gamma_d(i) * p.m(i)).epsilon(1e-14));
    }
}

TEST_CASE("reduced field vanishes at the solver steady state, not at the reference table") {
    const ValidatedParams p = validate(reference::params());
    CHECK(max_abs(reduced_rhs(truth_state(), p)) < 1e-10);

    const std::vector<double> f = reduced_rhs(reference::masses_state(), p);
    for (int i = 0; i < 4; ++i)
        CHECK(f[i] == doctest::Approx(testsupport::truth::rhs_at_reference[i]).epsilon(1e-6));
}

TEST_CASE("full field conserves the constraint functionals exactly") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
        const ValidatedParams p = validate(testsupport::random_params(rng, 1 + t % 4));
        const FullState mu = reduced_to_full(testsupport::random_feasible_state(rng, p), p);
        const std::vector<double> f = full_rhs(mu, p);
        const int K = p.K();
        for (int i = 0; i < K; ++i) CHECK(f[K + i] + f[2 * K + i] == 0.0);
        double buyers = 0.0;
        for (int i = 0; i < K; ++i) buyers += f[i];
        CHECK(buyers + f[3 * K] == 0.0);
    }
}

TEST_CASE("reduced field equals the full field through the constraint embedding") {
    std::mt19937_64 rng(5);
    int states = 0;
    while (states < 1000) {
        const ValidatedParams p = validate(testsupport::random_params(rng, 1 + states % 4));
        for (int rep = 0; rep < 10; ++rep, ++states) {
            const ReducedState x = testsupport::random_feasible_state(rng, p);
            const FullState mu = reduced_to_full(x, p);
            const std::vector<double> fr = reduced_rhs(x, p);
            const std::vector<double> ff = full_rhs(mu, p);
            const int K = p.K();
            for (int i = 0; i < K; ++i) {
                const double scale = std::max(1.0, std::abs(ff[i]));
                CHECK(std::abs(fr[i] - ff[i]) <= 1e-12 * scale);
                CHECK(std::abs(fr[K + i] - ff[K + i]) <=
                      1e-12 * std::max(1.0, std::abs(ff[K + i])));
            }
        }
    }
}

TEST_CASE("steady start stays put") {
    const ValidatedParams p = validate(reference::params());
    const SteadyState s = solve_steady_state(p);
    const Trajectory tr = integrate(s.x, p, 1e-3, 1.0);
    double drift = 0.0;
    for (int i = 0; i < 4; ++i)
        drift = std::max(drift, std::abs(tr.states.back().x[i] - s.x.x[i]));
    CHECK(drift < 1e-10);
}

TEST_CASE("perturbed starts flow back to the steady state") {
    const ValidatedParams p = validate(reference::params());
    const SteadyState s = solve_steady_state(p);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    ReducedState x0 = s.x;
    double norm = 0.0;
    std::vector<double> dir(4);
    for (auto& d : dir) {
        d = unif(rng);
        norm += d * d;
    }
    norm = std::sqrt(norm);
    // clamp into the state space: the steady buyer mass of asset 2 is ~1e-4,
    // so an unrestricted radius-0.005 ball leaves the positive orthant
    for (int i = 0; i < 4; ++i)
        x0.x[i] = std::max(x0.x[i] + 0.005 * dir[i] / norm, 1e-9);
    const Trajectory tr = integrate(x0, p, 1e-3, 50.0);
    double dist = 0.0;
    for (int i = 0; i < 4; ++i)
        dist = std::max(dist, std::abs(tr.states.back().x[i] - s.x.x[i]));
    CHECK(dist < 1e-6);
    // every stored state obeys the reduced-state bounds up to drift 1e-9
    for (const ReducedState& st : tr.states) CHECK(reduced_feasible(st, p, 1e-9));
}

TEST_CASE("integrator is fourth order (Richardson exponent)") {
    // step sizes respect the RK4 stability bound for the fast lambda modes
    const ValidatedParams p = validate(reference::params());
    const SteadyState s = solve_steady_state(p);
    ReducedState x0 = s.x;
    x0.buyer(0) += 0.003;
    x0.buyer(1) += 0.002;
    x0.seller(0) += 0.001;
    const double T = 0.2;
    const auto final_state = [&](double dt) {
        return integrate(x0, p, dt, T).states.back().x;
    };
    const std::vector<double> a = final_state(0.001);
    const std::vector<double> b = final_state(0.0005);
    const std::vector<double> c = final_state(0.00025);
    double e1 = 0.0, e2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        e1 = std::max(e1, std::abs(a[i] - b[i]));
        e2 = std::max(e2, std::abs(b[i] - c[i]));
    }
    const double order = std::log2(e1 / e2);
    CHECK(order > 3.5);
    CHECK(order < 4.5);
}

TEST_CASE("halving dt changes the endpoint at fourth order magnitude") {
    const ValidatedParams p = validate(reference::params());
    ReducedState x0 = make_reduced(2);
    x0.buyer(0) = 0.05;
    x0.buyer(1) = 0.01;
    x0.seller(0) = 0.001;
    x0.seller(1) = 0.1;
    const std::vector<double> a = integrate(x0, p, 2e-3, 1.0).states.back().x;
    const std::vector<double> b = integrate(x0, p, 1e-3, 1.0).states.back().x;
    double diff = 0.0;
    for (int i = 0; i < 4; ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
    CHECK(diff < 1e-8);  // fourth-order small step error at these rates
}

TEST_CASE("leaving the unit box raises blow-up with a time stamp") {
    const ValidatedParams p = validate(reference::params());
    ReducedState x0 = make_reduced(2);
    x0.x[0] = -1.0;  // below the -1e-9 floor immediately
    CHECK_THROWS_WITH_AS(integrate(x0, p, 1e-3, 1.0), doctest::Contains("blow-up"),
                         ConvergenceError);
    x0.x[0] = 2.0;  // above 1 + 1e-6
    CHECK_THROWS_WITH_AS(integrate(x0, p, 1e-3, 1.0), doctest::Contains("t = 0"),
                         ConvergenceError);
}

TEST_CASE("trajectory CSV header and shape") {
    const ValidatedParams p = validate(reference::params());
    const Trajectory tr = integrate(make_reduced(2), p, 0.01, 0.05);
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    const std::string out = os.str();
    CHECK(out.rfind("t,mu_h1n,mu_h2n,mu_l1o,mu_l2o\n", 0) == 0);
    CHECK(std::count(out.begin(), out.end(), '\n') == 7);  // header + 6 samples
}

TEST_CASE("invalid step or horizon is rejected") {
    const ValidatedParams p = validate(reference::params());
    CHECK_THROWS_AS(integrate(make_reduced(2), p, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(integrate(make_reduced(2), p, 1e-3, -1.0), ValidationError);
}
