#include "uqkd/cli/runner.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "uqkd/confidence.hpp"
#include "uqkd/errors.hpp"
#include "uqkd/worstcase.hpp"

namespace uqkd::cli {

namespace {

using RateAt = std::function<Row(double)>;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

ChannelParams channel_at(const Scenario& s, double L) {
    ChannelParams ch = s.channel;
    ch.L = L;
    return ch;
}

Row from_point(const RatePoint& p, std::string note = {}) {
    return {p.L, p.rate, p.Q, p.E, p.delta_bar, std::move(note)};
}

double mean_at_monitor(const Scenario& s) { return s.scheme.mu * s.scheme.xi(); }

std::optional<double> snr_of(const NoiseModel& n, double mean_m) {
    if (const auto* p = std::get_if<PoissonianNoise>(&n)) return mean_m / p->gamma;
    if (const auto* g = std::get_if<GaussianNoise>(&n)) return mean_m / g->sigma2;
    return std::nullopt;
}

void sweep(const Scenario& s, Curve& c, const RateAt& rate_at) {
    const auto grid = s.sweep.points();
    std::optional<std::size_t> last_positive;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        c.rows.push_back(rate_at(grid[i]));
        if (c.rows.back().rate > 0.0) last_positive = i;
    }
    if (!last_positive) return;
    if (*last_positive + 1 == grid.size()) {
        c.max_secure_km = grid.back();
        return;
    }
    // Refine between the last positive grid point and the next one.
    c.max_secure_km = secure_distance_threshold([&](double L) { return rate_at(L).rate; }, grid[*last_positive],
                                                grid[*last_positive + 1]);
}

double monitor_mu_upper(const Scenario& s, Report& report) {
    if (s.mu_upper) return *s.mu_upper;
    if (!s.monitor) return s.scheme.mu;
    // A record averages K pulses of Poisson(mu xi) monitor counts, so its sum
    // is Poisson(K mu xi).
    const double K = s.monitor->pulses_per_record;
    std::mt19937_64 rng(s.seed);
    std::poisson_distribution<std::int64_t> total(K * mean_at_monitor(s));
    std::vector<double> records(static_cast<std::size_t>(s.monitor->records));
    for (auto& r : records) r = static_cast<double>(total(rng)) / K;
    const auto iv = apn_interval(records, s.scheme.xi(), s.alpha);
    report.notes.push_back("apn monitor: mu in [" + num(iv.mu_lower) + ", " + num(iv.mu_upper) + "] from " +
                           std::to_string(records.size()) + " records");
    if (iv.degenerate) report.notes.push_back("apn monitor: zero record variance, interval collapsed");
    return iv.mu_upper;
}

struct Untagged {
    std::string label;
    double value = 1.0;
    ThresholdWindow window;
    std::optional<PipelineResult> pipeline;
    std::optional<double> snr;
    bool degenerate = false;
};

std::vector<Untagged> untagged_fractions(const Scenario& s, unsigned threads) {
    std::vector<Untagged> out;
    const double mean_m = mean_at_monitor(s);
    switch (s.untagged) {
        case UntaggedSource::Exact: {
            const auto& w = std::get<ThresholdWindow>(s.window);
            out.push_back({"exact", poisson_window_mass(mean_m, w.m1, w.m2), w, std::nullopt, std::nullopt, false});
            break;
        }
        case UntaggedSource::Fixed: {
            const auto& w = std::get<ThresholdWindow>(s.window);
            out.push_back({"fixed", s.untagged_value, w, std::nullopt, std::nullopt, false});
            break;
        }
        case UntaggedSource::MonteCarlo: {
            for (const auto& noise : s.noise) {
                RunConfig cfg;
                cfg.M = s.M;
                cfg.seed = s.seed;
                cfg.source = PoissonSource{s.scheme.mu};
                cfg.scheme = s.scheme;
                cfg.noise = noise;
                cfg.window = s.window;
                auto res = run_pipeline(cfg, s.alpha, threads);
                Untagged u;
                u.label = describe(noise);
                u.value = res.untagged_lower.value;
                u.degenerate = res.untagged_lower.degenerate;
                u.window = res.run.effective_window;
                u.pipeline = res;
                u.snr = snr_of(noise, mean_m);
                out.push_back(std::move(u));
            }
            break;
        }
    }
    return out;
}

Curve curve_for(const Untagged& u) {
    Curve c;
    c.label = u.label;
    c.untagged_lower = u.value;
    c.pipeline = u.pipeline;
    c.snr = u.snr;
    c.degenerate = u.degenerate;
    return c;
}

}  // namespace

Report execute(const Scenario& s, unsigned threads) {
    Report report;
    switch (s.mode) {
        case Mode::ApnBb84: {
            const double mu_upper = monitor_mu_upper(s, report);
            Curve c;
            c.label = "apn";
            std::optional<WorstCaseResult> fixed;
            if (!s.channel_matched) {
                fixed = maximize_ratio(s.scheme.eta(), mu_upper);
                report.notes.push_back("worst-case multiphoton bound " + num(fixed->p_multi_upper) + " at k* = " +
                                       std::to_string(fixed->k_star));
                if (fixed->feasibility_clamped) report.notes.push_back("worst-case bound clamped by feasibility");
            }
            sweep(s, c, [&](double L) {
                const auto sc = scheme_at(s, L);
                const double bound = fixed ? fixed->p_multi_upper : maximize_ratio(sc.eta(), mu_upper).p_multi_upper;
                return from_point(apn_rate_bb84_from_bound(sc, channel_at(s, L), bound, s.f_ec));
            });
            report.curves.push_back(std::move(c));
            break;
        }
        case Mode::TrustedBb84: {
            Curve c;
            c.label = "trusted";
            sweep(s, c, [&](double L) {
                const auto sc = scheme_at(s, L);
                return from_point(trusted_rate_bb84(sc.mu * sc.eta(), channel_at(s, L), s.f_ec));
            });
            report.curves.push_back(std::move(c));
            break;
        }
        case Mode::PnaBb84: {
            for (const auto& u : untagged_fractions(s, threads)) {
                Curve c = curve_for(u);
                sweep(s, c, [&](double L) {
                    return from_point(pna_rate_bb84(scheme_at(s, L), channel_at(s, L), u.window, u.value, s.f_ec));
                });
                report.curves.push_back(std::move(c));
            }
            break;
        }
        case Mode::PnaDecoy: {
            PassiveSchemeParams sc = s.scheme;
            sc.lambda = s.decoy.lambda_s;
            for (const auto& u : untagged_fractions(s, threads)) {
                Curve c = curve_for(u);
                sweep(s, c, [&](double L) {
                    const auto p = decoy_rate_untagged(sc, channel_at(s, L), s.decoy, u.window, u.value, u.value);
                    return from_point(p, p.diagnostic);
                });
                report.curves.push_back(std::move(c));
            }
            break;
        }
        case Mode::TrustedDecoy: {
            Curve c;
            c.label = "trusted";
            sweep(s, c, [&](double L) {
                const auto p = trusted_decoy_rate(channel_at(s, L), s.decoy);
                return from_point(p, p.diagnostic);
            });
            report.curves.push_back(std::move(c));
            break;
        }
        case Mode::McPipeline: {
            for (const auto& u : untagged_fractions(s, threads)) {
                Curve c = curve_for(u);
                c.true_window_mass = poisson_window_mass(mean_at_monitor(s), u.window.m1, u.window.m2);
                report.curves.push_back(std::move(c));
            }
            break;
        }
    }
    for (const auto& c : report.curves)
        if (c.degenerate) report.notes.push_back(c.label + ": untagged bound degenerate, reported as 0");
    return report;
}

void write_report(std::ostream& os, const Scenario& s, const Report& r) {
    os << "# uqkd " << kVersion << '\n';
    os << "# scenario: " << s.name << '\n';
    if (!s.description.empty()) os << "# description: " << s.description << '\n';
    os << "# resolved configuration:\n";
    std::istringstream yaml(to_yaml(s));
    for (std::string line; std::getline(yaml, line);) os << "#   " << line << '\n';
    for (const auto& n : r.notes) os << "# note: " << n << '\n';

    if (s.mode == Mode::McPipeline) {
        os << "curve,M,k_prime,m1,m2,observed_min,observed_max,p_lower,untagged_lower,true_window_mass,degenerate,"
              "snr\n";
        for (const auto& c : r.curves) {
            const auto& p = *c.pipeline;
            os << c.label << ',' << p.run.M << ',' << p.run.k_prime << ',' << p.run.effective_window.m1 << ','
               << p.run.effective_window.m2 << ',' << num(p.run.observed_min) << ',' << num(p.run.observed_max) << ','
               << num(p.measured.lower) << ',' << num(p.untagged_lower.value) << ',' << num(*c.true_window_mass)
               << ',' << (c.degenerate ? 1 : 0) << ',' << (c.snr ? num(*c.snr) : "") << '\n';
        }
    } else {
        os << "curve,L_km,rate,Q,E,delta_bar,untagged_lower,note\n";
        for (const auto& c : r.curves)
            for (const auto& row : c.rows)
                os << c.label << ',' << num(row.L) << ',' << num(row.rate) << ',' << num(row.Q) << ',' << num(row.E)
                   << ',' << num(row.delta_bar) << ',' << (c.untagged_lower ? num(*c.untagged_lower) : "") << ','
                   << row.note << '\n';
    }
    std::ostringstream summary;
    write_summary(summary, s, r);
    std::istringstream lines(summary.str());
    for (std::string line; std::getline(lines, line);) os << "# " << line << '\n';
}

void write_summary(std::ostream& os, const Scenario& s, const Report& r) {
    for (const auto& c : r.curves) {
        os << c.label << ':';
        if (s.mode != Mode::McPipeline)
            os << " max secure distance " << (c.max_secure_km ? num(*c.max_secure_km) + " km" : std::string("none"));
        if (c.untagged_lower) os << ", untagged lower bound " << num(*c.untagged_lower);
        if (c.true_window_mass) os << ", true window mass " << num(*c.true_window_mass);
        if (c.snr) os << ", SNR " << num(*c.snr);
        if (c.degenerate) os << " (degenerate)";
        os << '\n';
    }
}

}  // namespace uqkd::cli
