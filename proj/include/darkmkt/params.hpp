#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "darkmkt/errors.hpp"

namespace darkmkt {

// Exogenous description of a partially segmented market with K assets.
// All rates are per year; m[i] are supply fractions of the investor mass.
struct ModelParams {
    int K = 0;
    std::vector<double> lambda;         // meeting intensity per asset
    std::vector<double> gamma_u;        // owner low -> high switch rate
    std::vector<double> gamma_d;        // owner high -> low switch rate
    std::vector<double> gamma_tilde_u;  // non-owner low -> high (chooses asset i)
    std::vector<double> gamma_tilde_d;  // non-owner high -> low
    std::vector<double> m;              // asset supply fractions, sum < 1
    std::vector<double> delta_h;        // dividend flow
    std::vector<double> delta_d;        // holding cost, 0 < delta_d < delta_h
    double q = 0.5;                     // seller bargaining power in (0,1)
    double r = 0.05;                    // risk-free rate
};

// Aggregates implied by the per-direction switch rates.
struct DerivedParams {
    std::vector<double> gamma;        // gamma_u + gamma_d
    std::vector<double> gamma_tilde;  // gamma_tilde_u + gamma_tilde_d
    double m_total = 0.0;
};

// ModelParams that passed validate(), with aggregates attached. Immutable.
class ValidatedParams {
  public:
    const ModelParams& raw() const { return p_; }
    const DerivedParams& derived() const { return d_; }

    int K() const { return p_.K; }
    double lambda(int i) const { return p_.lambda[i]; }
    double gamma_u(int i) const { return p_.gamma_u[i]; }
    double gamma_d(int i) const { return p_.gamma_d[i]; }
    double gamma_tilde_u(int i) const { return p_.gamma_tilde_u[i]; }
    double gamma_tilde_d(int i) const { return p_.gamma_tilde_d[i]; }
    double m(int i) const { return p_.m[i]; }
    double delta_h(int i) const { return p_.delta_h[i]; }
    double delta_d(int i) const { return p_.delta_d[i]; }
    double q() const { return p_.q; }
    double r() const { return p_.r; }
    double gamma(int i) const { return d_.gamma[i]; }
    double gamma_tilde(int i) const { return d_.gamma_tilde[i]; }
    double m_total() const { return d_.m_total; }

  private:
    friend ValidatedParams validate(const ModelParams& p);
    ModelParams p_;
    DerivedParams d_;
};

// Checks every invariant and reports all violations at once (strict: no
// clamping, zero rates rejected). Throws ValidationError.
ValidatedParams validate(const ModelParams& p);

// JSON config ingestion. Schema:
//   {K, lambda:[...], gamma_u:[...], gamma_d:[...], gamma_tilde_u:[...],
//    gamma_tilde_d:[...], m:[...], delta_h:[...], delta_d:[...], q, r}
// Array lengths must equal K. Throws IoError / ValidationError.
ModelParams params_from_json(const std::string& json_text);
ModelParams load_params_file(const std::string& path);
std::string params_to_json(const ModelParams& p);

}  // namespace darkmkt
