#include "darkmkt/abm.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

namespace darkmkt {

namespace {

constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53

double uniform01(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * kInv53; }

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
        h ^= (v >> (8 * b)) & 0xffULL;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

AbmSeries simulate(const ValidatedParams& p, const AbmConfig& cfg) {
    const int K = p.K();
    const long N = cfg.n_agents;
    if (N < 2) throw ValidationError("abm: need at least 2 agents");
    if (!(cfg.t_max > 0.0) || !(cfg.sample_dt > 0.0))
        throw ValidationError("abm: t_max and sample_dt must be > 0");

    std::vector<long> n_hn(K, 0), n_lo(K, 0), n_ho(K);
    long owners = 0;
    for (int i = 0; i < K; ++i) {
        n_ho[i] = std::llround(static_cast<double>(N) * p.m(i));
        if (n_ho[i] < 1)
            throw ValidationError("abm: round(N m_i) < 1 for asset " + std::to_string(i + 1));
        owners += n_ho[i];
    }
    long n_ln = N - owners;
    if (n_ln < 1) throw ValidationError("abm: no non-owners after initialization");

    AbmSeries out;
    out.K = K;
    out.n_agents = N;
    out.trade_counts.assign(K, 0);
    out.seller_exposure.assign(K, 0.0);
    out.event_hash = 1469598103934665603ULL;  // FNV offset basis

    std::mt19937_64 eng(cfg.seed);
    const double invN = 1.0 / static_cast<double>(N);

    const long n_samples = static_cast<long>(std::floor(cfg.t_max / cfg.sample_dt + 1e-9));
    out.t.reserve(n_samples + 1);

    std::vector<double> integ_hn(K, 0.0), integ_lo(K, 0.0);
    std::vector<long> trades(K, 0);

    // per-sample integral / count columns used by compare_to_meanfield
    std::vector<std::vector<double>> integ_hn_s, integ_lo_s;
    std::vector<std::vector<long>> trades_s;

    const auto emit = [&](double ts, double t_cur) {
        out.t.push_back(ts);
        std::vector<double> hn(K), lo(K), ho(K), ihn(K), ilo(K);
        std::vector<long> tc(K);
        const double span = ts - t_cur;
        for (int i = 0; i < K; ++i) {
            hn[i] = n_hn[i] * invN;
            lo[i] = n_lo[i] * invN;
            ho[i] = n_ho[i] * invN;
            ihn[i] = integ_hn[i] + hn[i] * span;
            ilo[i] = integ_lo[i] + lo[i] * span;
            tc[i] = trades[i];
        }
        out.mu_hn.push_back(std::move(hn));
        out.mu_lo.push_back(std::move(lo));
        out.mu_ho.push_back(std::move(ho));
        out.mu_ln.push_back(n_ln * invN);
        integ_hn_s.push_back(std::move(ihn));
        integ_lo_s.push_back(std::move(ilo));
        trades_s.push_back(std::move(tc));
    };

    double t = 0.0;
    long next_sample = 0;
    emit(0.0, 0.0);
    ++next_sample;

    std::vector<double> rates(5 * static_cast<size_t>(K));
    while (t < cfg.t_max) {
        double R = 0.0;
        for (int i = 0; i < K; ++i) {
            rates[5 * i + 0] = p.gamma_tilde_u(i) * static_cast<double>(n_ln);
            rates[5 * i + 1] = p.gamma_tilde_d(i) * static_cast<double>(n_hn[i]);
            rates[5 * i + 2] = p.gamma_u(i) * static_cast<double>(n_lo[i]);
            rates[5 * i + 3] = p.gamma_d(i) * static_cast<double>(n_ho[i]);
            rates[5 * i + 4] =
                p.lambda(i) * static_cast<double>(n_hn[i]) * static_cast<double>(n_lo[i]) * invN;
            for (int c = 0; c < 5; ++c) R += rates[5 * i + c];
        }
        double t_next;
        if (R > 0.0) {
            t_next = t - std::log1p(-uniform01(eng)) / R;
        } else {
            t_next = cfg.t_max + cfg.sample_dt;  // absorbed
        }

        const double horizon = std::min(t_next, cfg.t_max);
        while (next_sample <= n_samples &&
               static_cast<double>(next_sample) * cfg.sample_dt <= horizon + 1e-12) {
            emit(static_cast<double>(next_sample) * cfg.sample_dt, t);
            ++next_sample;
        }
        if (t_next >= cfg.t_max) {
            for (int i = 0; i < K; ++i)
                out.seller_exposure[i] += static_cast<double>(n_lo[i]) * (cfg.t_max - t);
            break;
        }

        // advance integrals over the holding interval
        const double span = t_next - t;
        for (int i = 0; i < K; ++i) {
            integ_hn[i] += n_hn[i] * invN * span;
            integ_lo[i] += n_lo[i] * invN * span;
            out.seller_exposure[i] += static_cast<double>(n_lo[i]) * span;
        }
        t = t_next;

        // pick a channel
        double v = uniform01(eng) * R;
        int ch = 0;
        for (size_t c = 0; c < rates.size(); ++c) {
            v -= rates[c];
            if (v <= 0.0 || c + 1 == rates.size()) {
                ch = static_cast<int>(c);
                break;
            }
        }
        const int i = ch / 5;
        switch (ch % 5) {
            case 0: --n_ln; ++n_hn[i]; break;
            case 1: --n_hn[i]; ++n_ln; break;
            case 2: --n_lo[i]; ++n_ho[i]; break;
            case 3: --n_ho[i]; ++n_lo[i]; break;
            case 4:
                --n_hn[i];
                --n_lo[i];
                ++n_ho[i];
                ++n_ln;
                ++trades[i];
                ++out.trade_counts[i];
                break;
        }
        out.event_hash = fnv1a(out.event_hash, static_cast<std::uint64_t>(ch));
        out.event_hash = fnv1a(out.event_hash, std::bit_cast<std::uint64_t>(t));
        ++out.n_events;
    }

    // stash per-sample columns in the series for the comparison step
    out.integ_hn_samples = std::move(integ_hn_s);
    out.integ_lo_samples = std::move(integ_lo_s);
    out.trades_samples = std::move(trades_s);
    return out;
}

MeanfieldComparison compare_to_meanfield(const AbmSeries& series, const SteadyState& s,
                                         double burn_in, double days_per_year) {
    const int K = series.K;
    if (series.t.size() < 2) throw ValidationError("compare_to_meanfield: series too short");
    size_t b = 0;
    while (b + 1 < series.t.size() && series.t[b] < burn_in) ++b;
    const size_t e = series.t.size() - 1;
    if (b >= e) throw ValidationError("compare_to_meanfield: burn-in leaves no tail");
    const double span = series.t[e] - series.t[b];

    MeanfieldComparison cmp;
    cmp.tail_average.resize(2 * K);
    cmp.mean_time_to_sale_days.resize(K);
    for (int i = 0; i < K; ++i) {
        const double avg_hn =
            (series.integ_hn_samples[e][i] - series.integ_hn_samples[b][i]) / span;
        const double avg_lo =
            (series.integ_lo_samples[e][i] - series.integ_lo_samples[b][i]) / span;
        cmp.tail_average[i] = avg_hn;
        cmp.tail_average[K + i] = avg_lo;
        cmp.sup_distance = std::max(cmp.sup_distance, std::abs(avg_hn - s.x.buyer(i)));
        cmp.sup_distance = std::max(cmp.sup_distance, std::abs(avg_lo - s.x.seller(i)));
        const long tail_trades = series.trades_samples[e][i] - series.trades_samples[b][i];
        if (tail_trades > 0) {
            const double exposure_agent_years =
                (series.integ_lo_samples[e][i] - series.integ_lo_samples[b][i]) *
                static_cast<double>(series.n_agents);
            cmp.mean_time_to_sale_days[i] =
                exposure_agent_years / static_cast<double>(tail_trades) * days_per_year;
        } else {
            cmp.mean_time_to_sale_days[i] = std::numeric_limits<double>::infinity();
        }
    }
    return cmp;
}

void write_abm_csv(std::ostream& os, const AbmSeries& series) {
    const int K = series.K;
    os << "t";
    for (int i = 0; i < K; ++i) os << ",h" << (i + 1) << "_n";
    for (int i = 0; i < K; ++i) os << ",l" << (i + 1) << "_o";
    for (int i = 0; i < K; ++i) os << ",h" << (i + 1) << "_o";
    os << ",l_n\n";
    char buf[32];
    for (size_t sidx = 0; sidx < series.t.size(); ++sidx) {
        std::snprintf(buf, sizeof(buf), "%.12g", series.t[sidx]);
        os << buf;
        for (int i = 0; i < K; ++i) {
            std::snprintf(buf, sizeof(buf), "%.12g", series.mu_hn[sidx][i]);
            os << ',' << buf;
        }
        for (int i = 0; i < K; ++i) {
            std::snprintf(buf, sizeof(buf), "%.12g", series.mu_lo[sidx][i]);
            os << ',' << buf;
        }
        for (int i = 0; i < K; ++i) {
            std::snprintf(buf, sizeof(buf), "%.12g", series.mu_ho[sidx][i]);
            os << ',' << buf;
        }
        std::snprintf(buf, sizeof(buf), "%.12g", series.mu_ln[sidx]);
        os << ',' << buf << "\n";
    }
}

}  // namespace darkmkt
