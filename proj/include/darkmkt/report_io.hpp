#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "darkmkt/abm.hpp"
#include "darkmkt/dynamics.hpp"
#include "darkmkt/pricing.hpp"
#include "darkmkt/stability.hpp"
#include "darkmkt/statics.hpp"

namespace darkmkt {

// All emitted numbers carry 12 significant digits so repeated runs produce
// byte-identical files.
double round12(double v);

nlohmann::ordered_json steady_state_json(const ValidatedParams& p, const SteadyState& s);
nlohmann::ordered_json certificate_json(const StabilityCertificate& cert);
nlohmann::ordered_json price_report_json(const ValidatedParams& p, const ReducedState& x,
                                         const PriceReport& rep);
nlohmann::ordered_json limit_report_json(const LimitReport& rep);

void write_sweep_csv(std::ostream& os, const SweepResult& sw);

// Writes text to path ("-" means stdout). Throws IoError on failure.
void write_output(const std::string& path, const std::string& content);

// Side-by-side reference-vs-computed tables for the bundled two-asset
// example; returns formatted text.
std::string render_reference_report(const ValidatedParams& p);

}  // namespace darkmkt
