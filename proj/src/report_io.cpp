#include "darkmkt/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "darkmkt/reference_two_asset.hpp"

namespace darkmkt {

double round12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::strtod(buf, nullptr);
}

namespace {

nlohmann::ordered_json arr12(const std::vector<double>& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (double x : v) a.push_back(round12(x));
    return a;
}

}  // namespace

nlohmann::ordered_json steady_state_json(const ValidatedParams& p, const SteadyState& s) {
    const FullState f = reduced_to_full(s.x, p);
    nlohmann::ordered_json j;
    j["K"] = p.K();
    j["mu_hn"] = arr12(f.mu_hn);
    j["mu_lo"] = arr12(f.mu_lo);
    j["mu_ho"] = arr12(f.mu_ho);
    j["mu_ln"] = round12(f.mu_ln);
    j["residual"] = round12(s.residual);
    j["iterations"] = s.iterations;
    j["method"] = s.method;
    return j;
}

nlohmann::ordered_json certificate_json(const StabilityCertificate& cert) {
    nlohmann::ordered_json j;
    j["minors"] = arr12(cert.minors);
    j["dominance_vector"] = arr12(cert.d);
    nlohmann::ordered_json spec = nlohmann::ordered_json::array();
    for (const auto& ev : cert.spectrum) {
        spec.push_back({{"re", round12(ev.real())}, {"im", round12(ev.imag())}});
    }
    j["spectrum"] = spec;
    j["max_real_part"] = round12(cert.max_real_part);
    j["minors_positive"] = cert.minors_positive;
    j["dominance_ok"] = cert.dominance_ok;
    j["spectrum_negative"] = cert.spectrum_negative;
    j["verdict"] = cert.verdict == Verdict::stable ? "asymptotically stable" : "inconclusive";
    if (!cert.note.empty()) j["note"] = cert.note;
    return j;
}

nlohmann::ordered_json price_report_json(const ValidatedParams& p, const ReducedState& x,
                                         const PriceReport& rep) {
    const PricingIntermediates im = intermediates(p, x);
    nlohmann::ordered_json j;
    j["mu_hn"] = arr12(std::vector<double>(x.x.begin(), x.x.begin() + p.K()));
    j["mu_lo"] = arr12(std::vector<double>(x.x.begin() + p.K(), x.x.end()));
    j["a"] = arr12(im.a);
    j["d"] = arr12(im.d);
    j["Psi"] = arr12(im.Psi);
    j["Gamma"] = arr12(im.Gamma);
    j["Lambda"] = arr12(im.Lambda);
    j["Omega"] = arr12(im.Omega);
    j["Theta"] = round12(im.Theta);
    j["delta_l"] = arr12(rep.delta_l);
    j["delta_h"] = arr12(rep.delta_h);
    j["price"] = arr12(rep.price);
    j["price_bargain"] = arr12(rep.price_bargain);
    j["price_display_form"] = arr12(rep.price_display);
    nlohmann::ordered_json warn = nlohmann::ordered_json::array();
    for (bool b : rep.display_deviates) warn.push_back(b);
    j["display_form_deviates"] = warn;
    j["timing_days"] = arr12(rep.timing_days);
    j["min_timing_days"] = round12(rep.min_timing_days);
    j["max_timing_days"] = round12(rep.max_timing_days);
    j["q_effective"] = round12(rep.q_effective);
    return j;
}

nlohmann::ordered_json limit_report_json(const LimitReport& rep) {
    nlohmann::ordered_json j;
    switch (rep.kind) {
        case LimitKind::gamma_u: j["kind"] = "gamma_u"; break;
        case LimitKind::gamma_d: j["kind"] = "gamma_d"; break;
        case LimitKind::gamma_tilde_d: j["kind"] = "gamma_tilde_d"; break;
        case LimitKind::lambda: j["kind"] = "lambda"; break;
    }
    j["analytic"] = arr12(rep.analytic);
    j["reference_formula"] = arr12(rep.reference_formula);
    j["reference_formula_deviates"] = rep.reference_formula_deviates;
    nlohmann::ordered_json seq = nlohmann::ordered_json::array();
    for (size_t k = 0; k < rep.scale_factors.size(); ++k) {
        seq.push_back({{"scale", round12(rep.scale_factors[k])},
                       {"price", arr12(rep.scaling_prices[k])}});
    }
    j["scaling_sequence"] = seq;
    nlohmann::ordered_json conv = nlohmann::ordered_json::array();
    for (bool b : rep.converged) conv.push_back(b);
    j["converged"] = conv;
    if (!rep.note.empty()) j["note"] = rep.note;
    return j;
}

void write_sweep_csv(std::ostream& os, const SweepResult& sw) {
    const size_t K = sw.prices.empty() ? 0 : sw.prices.front().size();
    os << "param_value";
    for (size_t i = 0; i < K; ++i) os << ",P_" << (i + 1);
    os << ",converged\n";
    char buf[32];
    for (size_t g = 0; g < sw.grid.size(); ++g) {
        std::snprintf(buf, sizeof(buf), "%.12g", sw.grid[g]);
        os << buf;
        for (size_t i = 0; i < K; ++i) {
            if (sw.converged[g]) {
                std::snprintf(buf, sizeof(buf), "%.12g", sw.prices[g][i]);
                os << ',' << buf;
            } else {
                os << ",nan";
            }
        }
        os << ',' << (sw.converged[g] ? 1 : 0) << "\n";
    }
}

void write_output(const std::string& path, const std::string& content) {
    if (path == "-" || path.empty()) {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out << content;
    if (!out) throw IoError("failed writing output file: " + path);
}

namespace {

std::string fmt(double v, int prec = 4) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

void row(std::ostringstream& os, const std::string& label,
         const std::vector<std::string>& cells, size_t width = 11) {
    os << "  " << label;
    for (size_t i = label.size(); i < 30; ++i) os << ' ';
    for (const auto& c : cells) {
        for (size_t i = c.size(); i < width; ++i) os << ' ';
        os << c;
    }
    os << "\n";
}

}  // namespace

std::string render_reference_report(const ValidatedParams& p) {
    namespace ref = darkmkt::reference;
    std::ostringstream os;

    const SteadyState st = solve_steady_state(p);
    const FullState full = reduced_to_full(st.x, p);
    const StabilityCertificate cert = stability_certificate(p, st);
    const PriceReport pr_solved = equilibrium_prices(p, st.x);

    const bool is_reference = [&] {
        const ModelParams want = ref::params();
        const ModelParams& have = p.raw();
        return have.K == want.K && have.lambda == want.lambda && have.gamma_u == want.gamma_u &&
               have.gamma_d == want.gamma_d && have.gamma_tilde_u == want.gamma_tilde_u &&
               have.gamma_tilde_d == want.gamma_tilde_d && have.m == want.m &&
               have.delta_h == want.delta_h && have.delta_d == want.delta_d &&
               have.q == want.q && have.r == want.r;
    }();

    os << "equilibrium proportions and prices\n";
    {
        std::vector<std::string> head = {"mu_h1n", "mu_h2n", "mu_l1o", "mu_l2o",
                                         "mu_h1o", "mu_h2o", "mu_ln",  "P_1",
                                         "P_2"};
        if (p.K() != 2) {
            os << "  (tabular layout is rendered for K = 2 only)\n";
        } else {
            row(os, "", head);
            if (is_reference) {
                row(os, "reference",
                    {fmt(ref::masses[0]), fmt(ref::masses[1]), fmt(ref::masses[2]),
                     fmt(ref::masses[3]), fmt(ref::mu_ho[0]), fmt(ref::mu_ho[1]),
                     fmt(ref::mu_ln), fmt(ref::prices[0]), fmt(ref::prices[1])});
            }
            row(os, "computed (solved)",
                {fmt(full.mu_hn[0]), fmt(full.mu_hn[1]), fmt(full.mu_lo[0]),
                 fmt(full.mu_lo[1]), fmt(full.mu_ho[0]), fmt(full.mu_ho[1]), fmt(full.mu_ln),
                 fmt(pr_solved.price[0]), fmt(pr_solved.price[1])});
            if (is_reference) {
                const PriceReport pr_ref = equilibrium_prices(p, ref::masses_state());
                row(os, "computed (reference masses)",
                    {fmt(ref::masses[0]), fmt(ref::masses[1]), fmt(ref::masses[2]),
                     fmt(ref::masses[3]), fmt(p.m(0) - ref::masses[2]),
                     fmt(p.m(1) - ref::masses[3]),
                     fmt(1.0 - p.m_total() - ref::masses[0] - ref::masses[1]),
                     fmt(pr_ref.price[0]), fmt(pr_ref.price[1])});
            }
        }
    }

    if (p.K() == 2 && is_reference) {
        os << "\npricing intermediates\n";
        std::vector<std::string> head = {"Gamma_1", "Gamma_2", "Omega_1", "Omega_2",
                                         "Lambda_1", "Lambda_2", "Psi_1", "Psi_2"};
        row(os, "", head);
        row(os, "reference",
            {fmt(ref::Gamma[0]), fmt(ref::Gamma[1]), fmt(ref::Omega[0]), fmt(ref::Omega[1]),
             fmt(ref::Lambda[0]), fmt(ref::Lambda[1]), fmt(ref::Psi[0]), fmt(ref::Psi[1])});
        const PricingIntermediates im_ref = intermediates(p, ref::masses_state());
        row(os, "computed (reference masses)",
            {fmt(im_ref.Gamma[0]), fmt(im_ref.Gamma[1]), fmt(im_ref.Omega[0]),
             fmt(im_ref.Omega[1]), fmt(im_ref.Lambda[0]), fmt(im_ref.Lambda[1]),
             fmt(im_ref.Psi[0]), fmt(im_ref.Psi[1])});
        const PricingIntermediates im_sol = intermediates(p, st.x);
        row(os, "computed (solved)",
            {fmt(im_sol.Gamma[0]), fmt(im_sol.Gamma[1]), fmt(im_sol.Omega[0]),
             fmt(im_sol.Omega[1]), fmt(im_sol.Lambda[0]), fmt(im_sol.Lambda[1]),
             fmt(im_sol.Psi[0]), fmt(im_sol.Psi[1])});

        os << "\nseller timing (days)\n";
        row(os, "", {"asset 1", "asset 2"});
        row(os, "reference", {fmt(ref::timing_days[0], 1), fmt(ref::timing_days[1], 1)});
        const SellerTiming tm_ref = seller_timing(p, ref::masses_state());
        row(os, "computed (reference masses)", {fmt(tm_ref.days[0], 1), fmt(tm_ref.days[1], 1)});
        const SellerTiming tm_sol = seller_timing(p, st.x);
        row(os, "computed (solved)", {fmt(tm_sol.days[0], 1), fmt(tm_sol.days[1], 1)});
    }

    os << "\nstability: verdict "
       << (cert.verdict == Verdict::stable ? "asymptotically stable" : "inconclusive")
       << ", max Re(eig) = " << fmt(cert.max_real_part, 6) << ", minors";
    for (double mv : cert.minors) os << ' ' << fmt(mv, 6);
    os << "\nsolver: residual " << fmt(st.residual, 16) << " after " << st.iterations
       << " iterations (" << st.method << ")\n";
    if (is_reference) {
        os << "\nnote: reference rows reproduce the published table for this parameter set;\n"
              "diverging computed values are expected where the published table is not a\n"
              "zero of the stated dynamics (see README).\n";
    }
    return os.str();
}

}  // namespace darkmkt
