#include "darkmkt/params.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace darkmkt {

namespace {

void check_len(std::vector<std::string>& errs, const char* name,
               const std::vector<double>& v, int K) {
    if (static_cast<int>(v.size()) != K) {
        errs.push_back(std::string(name) + " has length " + std::to_string(v.size()) +
                       ", expected K=" + std::to_string(K));
    }
}

void check_positive(std::vector<std::string>& errs, const char* name,
                    const std::vector<double>& v) {
    for (size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
            errs.push_back(std::string(name) + " not strictly positive for asset " +
                           std::to_string(i + 1));
        }
    }
}

}  // namespace

ValidatedParams validate(const ModelParams& p) {
    std::vector<std::string> errs;
    if (p.K < 1) errs.push_back("K must be >= 1");

    if (p.K >= 1) {
        check_len(errs, "lambda", p.lambda, p.K);
        check_len(errs, "gamma_u", p.gamma_u, p.K);
        check_len(errs, "gamma_d", p.gamma_d, p.K);
        check_len(errs, "gamma_tilde_u", p.gamma_tilde_u, p.K);
        check_len(errs, "gamma_tilde_d", p.gamma_tilde_d, p.K);
        check_len(errs, "m", p.m, p.K);
        check_len(errs, "delta_h", p.delta_h, p.K);
        check_len(errs, "delta_d", p.delta_d, p.K);
    }
    if (!errs.empty()) throw ValidationError("invalid parameters: " + [&] {
        std::string s;
        for (auto& e : errs) s += "\n  - " + e;
        return s;
    }());

    check_positive(errs, "lambda", p.lambda);
    check_positive(errs, "gamma_u", p.gamma_u);
    check_positive(errs, "gamma_d", p.gamma_d);
    check_positive(errs, "gamma_tilde_u", p.gamma_tilde_u);
    check_positive(errs, "gamma_tilde_d", p.gamma_tilde_d);
    check_positive(errs, "delta_h", p.delta_h);
    check_positive(errs, "delta_d", p.delta_d);

    double msum = 0.0;
    for (int i = 0; i < p.K; ++i) {
        if (!(p.m[i] > 0.0 && p.m[i] < 1.0)) {
            errs.push_back("m not in (0,1) for asset " + std::to_string(i + 1));
        }
        msum += p.m[i];
    }
    if (!(msum < 1.0)) errs.push_back("sum of m not < 1");
    for (int i = 0; i < p.K; ++i) {
        if (!(p.delta_h[i] > p.delta_d[i])) {
            errs.push_back("delta_d >= delta_h for asset " + std::to_string(i + 1));
        }
    }
    if (!(p.q > 0.0 && p.q < 1.0)) errs.push_back("q not in (0,1)");
    if (!(p.r > 0.0) || !std::isfinite(p.r)) errs.push_back("r not strictly positive");

    if (!errs.empty()) {
        std::string s = "invalid parameters:";
        for (auto& e : errs) s += "\n  - " + e;
        throw ValidationError(s);
    }

    ValidatedParams vp;
    vp.p_ = p;
    vp.d_.gamma.resize(p.K);
    vp.d_.gamma_tilde.resize(p.K);
    for (int i = 0; i < p.K; ++i) {
        vp.d_.gamma[i] = p.gamma_u[i] + p.gamma_d[i];
        vp.d_.gamma_tilde[i] = p.gamma_tilde_u[i] + p.gamma_tilde_d[i];
    }
    vp.d_.m_total = msum;
    return vp;
}

namespace {

std::vector<double> get_array(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw ValidationError(std::string("missing config key: ") + key);
    if (!j.at(key).is_array()) throw ValidationError(std::string(key) + " must be an array");
    return j.at(key).get<std::vector<double>>();
}

}  // namespace

ModelParams params_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(std::string("config is not valid JSON: ") + e.what());
    }
    ModelParams p;
    if (!j.contains("K")) throw ValidationError("missing config key: K");
    p.K = j.at("K").get<int>();
    p.lambda = get_array(j, "lambda");
    p.gamma_u = get_array(j, "gamma_u");
    p.gamma_d = get_array(j, "gamma_d");
    p.gamma_tilde_u = get_array(j, "gamma_tilde_u");
    p.gamma_tilde_d = get_array(j, "gamma_tilde_d");
    p.m = get_array(j, "m");
    p.delta_h = get_array(j, "delta_h");
    p.delta_d = get_array(j, "delta_d");
    if (!j.contains("q") || !j.contains("r")) throw ValidationError("missing config key: q or r");
    p.q = j.at("q").get<double>();
    p.r = j.at("r").get<double>();
    return p;
}

ModelParams load_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return params_from_json(ss.str());
}

std::string params_to_json(const ModelParams& p) {
    nlohmann::ordered_json j;
    j["K"] = p.K;
    j["lambda"] = p.lambda;
    j["gamma_u"] = p.gamma_u;
    j["gamma_d"] = p.gamma_d;
    j["gamma_tilde_u"] = p.gamma_tilde_u;
    j["gamma_tilde_d"] = p.gamma_tilde_d;
    j["m"] = p.m;
    j["delta_h"] = p.delta_h;
    j["delta_d"] = p.delta_d;
    j["q"] = p.q;
    j["r"] = p.r;
    return j.dump(2);
}

}  // namespace darkmkt
