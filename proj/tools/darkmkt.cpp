// darkmkt: solve / simulate / stability / price / sweep / limits / abm / report
// over a segmented multi-asset market model. JSON configs in, JSON/CSV out.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "darkmkt/reference_two_asset.hpp"
#include "darkmkt/report_io.hpp"

namespace {

using namespace darkmkt;

std::vector<double> parse_grid(const std::string& spec) {
    // "start:stop:count"
    double start = 0.0, stop = 0.0;
    long count = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(spec);
    if (!(ss >> start >> c1 >> stop >> c2 >> count) || c1 != ':' || c2 != ':')
        throw ValidationError("bad --grid, expected start:stop:count");
    if (count < 2) throw ValidationError("grid count must be >= 2");
    if (!(stop > start)) throw ValidationError("grid needs start < stop");
    std::vector<double> g(count);
    for (long k = 0; k < count; ++k)
        g[k] = start + (stop - start) * static_cast<double>(k) / (count - 1);
    return g;
}

ReducedState parse_state(const std::string& csv, int K) {
    ReducedState x = make_reduced(K);
    std::istringstream ss(csv);
    std::string tok;
    int n = 0;
    while (std::getline(ss, tok, ',')) {
        if (n >= 2 * K) throw ValidationError("--x0 has more than 2K entries");
        x.x[n++] = std::stod(tok);
    }
    if (n != 2 * K) throw ValidationError("--x0 needs exactly 2K comma-separated entries");
    return x;
}

int run(int argc, char** argv) {
    CLI::App app{"segmented multi-asset market equilibrium toolkit"};
    app.require_subcommand(1);

    std::string config, out = "-";
    double tol = 1e-12;

    auto* solve_cmd = app.add_subcommand("solve", "solve the steady state");
    solve_cmd->add_option("--config", config, "parameter file (JSON)")->required();
    solve_cmd->add_option("--tol", tol, "residual tolerance");
    solve_cmd->add_option("--out", out, "output path (default stdout)");

    std::string x0_csv;
    double dt = 1e-3, t_max = 50.0;
    auto* sim_cmd = app.add_subcommand("simulate", "integrate the reduced dynamics (RK4)");
    sim_cmd->add_option("--config", config)->required();
    sim_cmd->add_option("--x0", x0_csv, "initial reduced state, 2K comma-separated values");
    sim_cmd->add_option("--dt", dt, "step size in years");
    sim_cmd->add_option("--t-max", t_max, "final time in years");
    sim_cmd->add_option("--out", out, "CSV output path");

    auto* stab_cmd = app.add_subcommand("stability", "certify asymptotic stability");
    stab_cmd->add_option("--config", config)->required();
    stab_cmd->add_option("--out", out);

    double q_hat = -1.0, days_per_year = 250.0;
    bool at_reference = false;
    auto* price_cmd = app.add_subcommand("price", "equilibrium prices and timings");
    price_cmd->add_option("--config", config)->required();
    price_cmd->add_option("--q-hat", q_hat, "per-meeting seller proposal probability");
    price_cmd->add_option("--days-per-year", days_per_year);
    price_cmd->add_flag("--at-reference-masses", at_reference,
                        "evaluate at the bundled reference masses instead of solving (K=2)");
    price_cmd->add_option("--out", out);

    std::string param_path, grid_spec = "0:100:400", mode_str = "frozen";
    int price_index = 1, jobs = 1;
    auto* sweep_cmd = app.add_subcommand("sweep", "comparative-statics price sweep");
    sweep_cmd->add_option("--config", config)->required();
    sweep_cmd->add_option("--param", param_path, "e.g. lambda.2")->required();
    sweep_cmd->add_option("--grid", grid_spec, "start:stop:count");
    sweep_cmd->add_option("--price", price_index, "1-based price index to classify");
    sweep_cmd->add_option("--mode", mode_str, "frozen | self-consistent");
    sweep_cmd->add_option("--jobs", jobs, "parallel workers");
    sweep_cmd->add_option("--out", out, "CSV output path");

    std::string kind = "lambda";
    auto* limits_cmd = app.add_subcommand("limits", "asymptotic price limits");
    limits_cmd->add_option("--config", config)->required();
    limits_cmd->add_option("--kind", kind, "lambda | gamma_u | gamma_d | gamma_tilde_d");
    limits_cmd->add_option("--out", out);

    long agents = 100000;
    double abm_tmax = 20.0, sample_dt = 0.01;
    std::uint64_t seed = 0;
    auto* abm_cmd = app.add_subcommand("abm", "finite-population event simulation");
    abm_cmd->add_option("--config", config)->required();
    abm_cmd->add_option("--agents", agents);
    abm_cmd->add_option("--t-max", abm_tmax);
    abm_cmd->add_option("--seed", seed);
    abm_cmd->add_option("--sample-dt", sample_dt);
    abm_cmd->add_option("--out", out, "CSV output path");

    std::string report_config = "configs/two_asset_example.json";
    auto* report_cmd =
        app.add_subcommand("report", "side-by-side reference vs computed tables");
    report_cmd->add_option("--config", report_config, "parameter file (JSON)");

    CLI11_PARSE(app, argc, argv);

    if (report_cmd->parsed()) {
        const ValidatedParams p = validate(load_params_file(report_config));
        write_output("-", render_reference_report(p));
        return 0;
    }

    const ValidatedParams p = validate(load_params_file(config));

    if (solve_cmd->parsed()) {
        const SteadyState s = solve_steady_state(p, std::nullopt, tol);
        write_output(out, steady_state_json(p, s).dump(2) + "\n");
    } else if (sim_cmd->parsed()) {
        ReducedState x0 = make_reduced(p.K());
        if (x0_csv.empty()) {
            for (int i = 0; i < p.K(); ++i) {
                x0.buyer(i) = p.gamma_tilde_u(i) * (1.0 - p.m_total()) / p.gamma_tilde(i);
                x0.seller(i) = seller_mass_at_steady(x0.buyer(i), p, i);
            }
        } else {
            x0 = parse_state(x0_csv, p.K());
        }
        const Trajectory tr = integrate(x0, p, dt, t_max);
        std::ostringstream os;
        write_trajectory_csv(os, tr);
        write_output(out, os.str());
    } else if (stab_cmd->parsed()) {
        const StabilityCertificate cert = stability_certificate(p);
        nlohmann::ordered_json j = certificate_json(cert);
        j["steady_state"] = steady_state_json(p, cert.steady_state);
        write_output(out, j.dump(2) + "\n");
    } else if (price_cmd->parsed()) {
        ReducedState x;
        if (at_reference) {
            if (p.K() != 2)
                throw ValidationError("--at-reference-masses needs the bundled K=2 example");
            x = reference::masses_state();
        } else {
            x = solve_steady_state(p).x;
        }
        PriceReport rep = equilibrium_prices(p, x, days_per_year);
        if (q_hat >= 0.0) rep.q_effective = effective_bargaining_power(q_hat, p, x);
        write_output(out, price_report_json(p, x, rep).dump(2) + "\n");
    } else if (sweep_cmd->parsed()) {
        SweepMode mode;
        if (mode_str == "frozen")
            mode = SweepMode::frozen;
        else if (mode_str == "self-consistent")
            mode = SweepMode::self_consistent;
        else
            throw ValidationError("bad --mode, expected frozen or self-consistent");
        if (price_index < 1 || price_index > p.K())
            throw ValidationError("--price out of range");
        const ReducedState x_ref = solve_steady_state(p).x;
        const SweepResult sw =
            price_sweep(p, x_ref, param_path, parse_grid(grid_spec), mode, jobs);
        std::ostringstream os;
        write_sweep_csv(os, sw);
        write_output(out, os.str());
        std::cerr << "P_" << price_index << "(" << param_path
                  << "): " << to_string(classify_monotonicity(sw, price_index - 1)) << "\n";
    } else if (limits_cmd->parsed()) {
        const ReducedState x_ref = solve_steady_state(p).x;
        LimitReport rep;
        if (kind == "lambda")
            rep = limit_lambda(p, x_ref);
        else if (kind == "gamma_u")
            rep = limit_gamma_u(p, x_ref);
        else if (kind == "gamma_d")
            rep = limit_gamma_d(p, x_ref);
        else if (kind == "gamma_tilde_d")
            rep = limit_gamma_tilde_d(p, x_ref);
        else
            throw ValidationError("bad --kind");
        nlohmann::ordered_json j = limit_report_json(rep);
        if (p.K() >= 2) {
            const ThetaLimits tl = gamma_tilde_u_path_dependence(p, x_ref);
            j["theta_path_limits"] = {{"equal_weights", round12(tl.equal_weights)},
                                      {"linear_weights", round12(tl.linear_weights)},
                                      {"difference", round12(tl.difference)}};
        }
        write_output(out, j.dump(2) + "\n");
    } else if (abm_cmd->parsed()) {
        AbmConfig cfg;
        cfg.n_agents = agents;
        cfg.t_max = abm_tmax;
        cfg.seed = seed;
        cfg.sample_dt = sample_dt;
        const AbmSeries series = simulate(p, cfg);
        std::ostringstream os;
        write_abm_csv(os, series);
        write_output(out, os.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
