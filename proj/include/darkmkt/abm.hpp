#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "darkmkt/equilibrium.hpp"

namespace darkmkt {

struct AbmConfig {
    long n_agents = 100000;
    double t_max = 20.0;
    std::uint64_t seed = 0;
    double sample_dt = 0.01;
};

// Sampled empirical proportions plus exact event statistics.
struct AbmSeries {
    int K = 0;
    long n_agents = 0;
    std::vector<double> t;
    std::vector<std::vector<double>> mu_hn;  // per sample, K entries
    std::vector<std::vector<double>> mu_lo;
    std::vector<std::vector<double>> mu_ho;
    std::vector<double> mu_ln;
    std::vector<long> trade_counts;       // total per asset over the whole run
    std::vector<double> seller_exposure;  // integral of n(li,o) dt over the whole run
    // exact cumulative integrals / counts at each sample time, so tail
    // statistics can be formed for any burn-in
    std::vector<std::vector<double>> integ_hn_samples;
    std::vector<std::vector<double>> integ_lo_samples;
    std::vector<std::vector<long>> trades_samples;
    std::uint64_t event_hash = 0;  // FNV-1a over the full event log
    long n_events = 0;
};

// Exact Gillespie simulation of the switching/meeting primitives with
// mass-action trade rate lambda_i n(hi,n) n(li,o) / N. Owners initialize
// high; per-asset owner counts round(N m_i) are conserved by every event.
// Identical seed and parameters give a bit-identical event log.
AbmSeries simulate(const ValidatedParams& p, const AbmConfig& cfg);

struct MeanfieldComparison {
    double sup_distance = 0.0;               // over reduced components, time-averaged tail
    std::vector<double> tail_average;        // 2K reduced components
    std::vector<double> mean_time_to_sale_days;  // exposure / trades, tail window
};

MeanfieldComparison compare_to_meanfield(const AbmSeries& series, const SteadyState& s,
                                         double burn_in, double days_per_year = 250.0);

// CSV with header t,h1_n,...,hK_n,l1_o,...,lK_o,h1_o,...,hK_o,l_n
void write_abm_csv(std::ostream& os, const AbmSeries& series);

}  // namespace darkmkt
