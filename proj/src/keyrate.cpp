#include "uqkd/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uqkd/errors.hpp"
#include "uqkd/worstcase.hpp"

namespace uqkd {

double ChannelParams::eta_f() const { return std::pow(10.0, -alpha_prime * L / 10.0); }

void ChannelParams::validate() const {
    if (!(eta_B > 0.0 && eta_B <= 1.0)) throw InvalidArgument("channel: eta_B must lie in (0,1]");
    if (!(alpha_prime > 0.0)) throw InvalidArgument("channel: alpha_prime must be positive");
    if (!(Y0 >= 0.0 && Y0 < 1.0)) throw InvalidArgument("channel: Y0 must lie in [0,1)");
    if (!(e_det >= 0.0 && e_det < 0.5)) throw InvalidArgument("channel: e_det must lie in [0,0.5)");
    if (!(e0 >= 0.0 && e0 <= 1.0)) throw InvalidArgument("channel: e0 must lie in [0,1]");
    if (!(L >= 0.0) || !std::isfinite(L)) throw InvalidArgument("channel: L must be non-negative");
}

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("binary_entropy: x must lie in [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -(x * std::log(x) + (1.0 - x) * std::log1p(-x)) / std::log(2.0);
}

GainQber channel_gain_qber(double mu_p2, const ChannelParams& ch) {
    if (!(mu_p2 >= 0.0)) throw InvalidArgument("channel_gain_qber: mean photon number must be non-negative");
    const double detect = -std::expm1(-mu_p2 * ch.eta_B * ch.eta_f());
    GainQber out;
    out.Q = ch.Y0 + detect;
    if (out.Q <= 0.0) {
        out.Q = 0.0;
        out.E = ch.e0;
        out.degenerate = true;
        return out;
    }
    out.E = (ch.e0 * ch.Y0 + ch.e_det * detect) / out.Q;
    return out;
}

double gllp_rate(double Q, double E, double delta_bar, double f_ec) {
    if (!(E >= 0.0 && E <= 1.0)) throw InvalidArgument("gllp_rate: E must lie in [0,1]");
    if (!(delta_bar >= 0.0)) throw InvalidArgument("gllp_rate: delta_bar must be non-negative");
    if (!(f_ec > 0.0)) throw InvalidArgument("gllp_rate: f_ec must be positive");
    if (!(Q > 0.0) || delta_bar >= 1.0) return 0.0;
    const double untagged = 1.0 - delta_bar;
    const double arg = E / untagged;
    // Beyond 1/2 the untagged bits are declared insecure.
    const double secure = arg > 0.5 ? 0.0 : untagged * (1.0 - binary_entropy(arg));
    const double leak = f_ec * binary_entropy(std::min(E, 1.0));
    return std::max(0.0, 0.5 * Q * (secure - leak));
}

namespace {

RatePoint assemble(const ChannelParams& ch, const GainQber& obs, double delta_bar, double f_ec) {
    RatePoint pt;
    pt.L = ch.L;
    pt.Q = obs.Q;
    pt.E = obs.E;
    pt.delta_bar = delta_bar;
    pt.rate = std::isfinite(delta_bar) ? gllp_rate(obs.Q, obs.E, delta_bar, f_ec) : 0.0;
    return pt;
}

double over_gain(double numerator, const GainQber& obs) {
    if (obs.degenerate) return std::numeric_limits<double>::infinity();
    return numerator / obs.Q;
}

}  // namespace

double apn_delta_bar(const PassiveSchemeParams& scheme, const ChannelParams& ch, double mu_upper) {
    const auto bound = maximize_ratio(scheme.eta(), mu_upper);
    return over_gain(bound.p_multi_upper, channel_gain_qber(scheme.mu * scheme.eta(), ch));
}

RatePoint apn_rate_bb84_from_bound(const PassiveSchemeParams& scheme, const ChannelParams& ch,
                                   double p_multi_upper, double f_ec) {
    const auto obs = channel_gain_qber(scheme.mu * scheme.eta(), ch);
    return assemble(ch, obs, over_gain(p_multi_upper, obs), f_ec);
}

RatePoint apn_rate_bb84(const PassiveSchemeParams& scheme, const ChannelParams& ch, double mu_upper, double f_ec) {
    return apn_rate_bb84_from_bound(scheme, ch, maximize_ratio(scheme.eta(), mu_upper).p_multi_upper, f_ec);
}

double trusted_delta_bar(double mu_p2, const ChannelParams& ch) {
    if (!(mu_p2 >= 0.0)) throw InvalidArgument("trusted_delta_bar: mean photon number must be non-negative");
    if (mu_p2 == 0.0) return 0.0;
    // 1 - (1+x) e^-x, arranged to avoid cancellation for small x.
    const double multi = -std::expm1(-mu_p2) - mu_p2 * std::exp(-mu_p2);
    return over_gain(multi, channel_gain_qber(mu_p2, ch));
}

RatePoint trusted_rate_bb84(double mu_p2, const ChannelParams& ch, double f_ec) {
    return assemble(ch, channel_gain_qber(mu_p2, ch), trusted_delta_bar(mu_p2, ch), f_ec);
}

const char* to_string(SchemeCase c) {
    switch (c) {
        case SchemeCase::I: return "I";
        case SchemeCase::II: return "II";
        case SchemeCase::III: return "III";
    }
    return "?";
}

LambdaA lambda_A(const PassiveSchemeParams& scheme) {
    scheme.validate();
    const double xi = scheme.xi();
    const double through = 1.0 - scheme.t_B;
    LambdaA out;
    if (std::abs(xi - through) < 1e-12) {
        out.case_id = SchemeCase::I;
        out.value = scheme.lambda;
    } else if (xi > through) {
        out.case_id = SchemeCase::III;
        out.value = scheme.lambda_a();
    } else {
        // validate() already rejected lambda > t_B t_D / (1 - t_B).
        out.case_id = SchemeCase::II;
        out.value = scheme.lambda_a();
    }
    return out;
}

namespace {

// a_n(t) = P(Binomial(n, t) >= 2), with the t = 1 endpoint that coefficient_a excludes.
double multiphoton_after_thinning(std::int64_t n, double t) {
    if (n < 2 || t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return coefficient_a(n, t);
}

}  // namespace

RatePoint pna_rate_bb84(const PassiveSchemeParams& scheme, const ChannelParams& ch, const ThresholdWindow& w,
                        double one_minus_delta, double f_ec) {
    w.validate();
    if (!(one_minus_delta >= 0.0 && one_minus_delta <= 1.0))
        throw InvalidArgument("pna_rate_bb84: untagged fraction must lie in [0,1]");
    const double la = lambda_A(scheme).value;
    const auto obs = channel_gain_qber(scheme.mu * scheme.eta(), ch);
    if (one_minus_delta == 0.0) return assemble(ch, obs, std::numeric_limits<double>::infinity(), f_ec);

    // Worst untagged multiphoton probability over the window sits at m2.
    const double at_top = multiphoton_after_thinning(w.m2, la);
    if (at_top < multiphoton_after_thinning(w.m1, la))
        throw NumericalError("pna_rate_bb84: multiphoton probability not increasing across the window");
    const double delta = 1.0 - one_minus_delta;
    return assemble(ch, obs, over_gain(delta + one_minus_delta * at_top, obs), f_ec);
}

void DecoySettings::validate(const PassiveSchemeParams& scheme) const {
    if (!(nu_s > 0.0 && nu_d > 0.0)) throw InvalidArgument("decoy: nu_s and nu_d must be positive");
    if (!(nu_d < nu_s)) throw InvalidArgument("decoy: nu_d must be smaller than nu_s");
    if (!(lambda_d > 0.0 && lambda_d < lambda_s))
        throw InvalidArgument("decoy: need 0 < lambda_d < lambda_s");
    const double ceiling = scheme.xi() / (1.0 - scheme.t_B);
    if (lambda_s > ceiling || lambda_s > 1.0)
        throw InvalidArgument("decoy: lambda_s exceeds t_B t_D / (1 - t_B)");
    if (!(f_ec >= 1.0)) throw InvalidArgument("decoy: f_ec must be >= 1");
}

namespace {

// log Binomial(n, t) pmf at k; exact product form for the small k that
// decoy estimation needs, where lgamma(n) would lose ~n*eps absolute.
double log_binomial_pmf(std::int64_t n, std::int64_t k, double t) {
    const double dk = static_cast<double>(k);
    const double dn = static_cast<double>(n);
    double log_c = 0.0;
    if (k <= 64) {
        for (std::int64_t j = 0; j < k; ++j) log_c += std::log(static_cast<double>(n - j));
        log_c -= std::lgamma(dk + 1.0);
    } else {
        log_c = std::lgamma(dn + 1.0) - std::lgamma(dk + 1.0) - std::lgamma(dn - dk + 1.0);
    }
    return log_c + dk * std::log(t) + (dn - dk) * std::log1p(-t);
}

double binomial_at(std::int64_t n, std::int64_t k, double t) {
    if (k < 0 || k > n) return 0.0;
    if (t >= 1.0) return k == n ? 1.0 : 0.0;
    if (t <= 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(log_binomial_pmf(n, k, t));
}

}  // namespace

PhotonBracket poisson_bracket(double nu) {
    auto pmf = [nu](std::int64_t k) {
        if (k < 0) return 0.0;
        const double dk = static_cast<double>(k);
        return std::exp(-nu + dk * std::log(nu) - std::lgamma(dk + 1.0));
    };
    return {pmf, pmf};
}

PhotonBracket window_bracket(const ThresholdWindow& w, double lambda_a) {
    w.validate();
    if (!(lambda_a > 0.0 && lambda_a <= 1.0)) throw InvalidArgument("window_bracket: lambda^A must lie in (0,1]");
    const std::int64_t m1 = w.m1;
    const std::int64_t m2 = w.m2;
    // For fixed k the pmf is unimodal in n, so the minimum over the window is
    // at an endpoint and the maximum at an endpoint or near n = k / lambda.
    auto lower = [=](std::int64_t k) { return std::min(binomial_at(m1, k, lambda_a), binomial_at(m2, k, lambda_a)); };
    auto upper = [=](std::int64_t k) {
        double best = std::max(binomial_at(m1, k, lambda_a), binomial_at(m2, k, lambda_a));
        const double mode = std::floor(static_cast<double>(k) / lambda_a);
        for (double cand : {mode - 1.0, mode, mode + 1.0}) {
            if (cand < static_cast<double>(m1) || cand > static_cast<double>(m2)) continue;
            best = std::max(best, binomial_at(static_cast<std::int64_t>(cand), k, lambda_a));
        }
        return best;
    };
    return {lower, upper};
}

DecoyRatePoint decoy_rate_bracketed(const PhotonBracket& signal, const PhotonBracket& decoy, const GainQber& obs_s,
                                    const GainQber& obs_d, const ChannelParams& ch, double one_minus_delta_s,
                                    double one_minus_delta_d, double f_ec, std::int64_t max_photon) {
    for (double f : {one_minus_delta_s, one_minus_delta_d})
        if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("decoy: untagged fraction must lie in [0,1]");

    DecoyRatePoint pt;
    pt.L = ch.L;
    pt.Q = obs_s.Q;
    pt.E = obs_s.E;
    pt.delta_bar = 1.0;
    auto fail = [&](std::string why) {
        pt.diagnostic = std::move(why);
        return pt;
    };
    if (obs_s.degenerate || obs_d.degenerate) return fail("zero gain");
    if (one_minus_delta_s == 0.0 || one_minus_delta_d == 0.0) return fail("no untagged pulses");

    const double Y0 = ch.Y0;
    // Tagged pulses: Eve may make them always click (signal) or never click
    // (decoy), whichever hurts the single-photon estimate.
    const double qd_untagged_lo = std::max(0.0, (obs_d.Q - (1.0 - one_minus_delta_d)) / one_minus_delta_d);
    const double qs_untagged_hi = std::min(1.0, obs_s.Q / one_minus_delta_s);

    // r bounds p_d(k)/p_s(k) for every k >= 2, so that
    // sum_{k>=2} p_d(k) Y_k <= r sum_{k>=2} p_s(k) Y_k.
    double r = 0.0;
    for (std::int64_t k = 2; k <= max_photon; ++k) {
        const double num = decoy.upper(k);
        const double den = signal.lower(k);
        if (num == 0.0) continue;
        if (den == 0.0) return fail("signal multiphoton probability vanishes where decoy's does not");
        r = std::max(r, num / den);
    }

    // Y1 (p_d(1) - r p_s(1)) >= Q_d - p_d(0) Y0 - r (Q_s - p_s(0) Y0), each term
    // taken at the end of its bracket that lowers the right-hand side.
    const double numerator = qd_untagged_lo - decoy.upper(0) * Y0 - r * (qs_untagged_hi - signal.lower(0) * Y0);
    const double denom_lo = decoy.lower(1) - r * signal.upper(1);
    const double denom_hi = decoy.upper(1) - r * signal.lower(1);
    if (!(denom_lo > 0.0)) return fail("decoy condition fails: single-photon coefficient not positive");
    if (!(numerator > 0.0)) return fail("single-photon yield bound is not positive");
    const double y1 = std::min(1.0, numerator / denom_hi);

    // e1 Y1 p_d(1) <= E_d Q_d (untagged share, tagged errors >= 0) - p_d(0) e0 Y0.
    const double errors_hi = obs_d.E * obs_d.Q / one_minus_delta_d;
    const double e1 = std::clamp((errors_hi - decoy.lower(0) * ch.e0 * Y0) / (decoy.lower(1) * y1), 0.0, 0.5);

    pt.Y1_lower = y1;
    pt.e1_upper = e1;
    pt.Q1_lower = one_minus_delta_s * signal.lower(1) * y1;
    pt.delta_bar = std::clamp(1.0 - pt.Q1_lower / obs_s.Q, 0.0, 1.0);
    pt.rate = std::max(0.0, 0.5 * (-obs_s.Q * f_ec * binary_entropy(obs_s.E) +
                                   pt.Q1_lower * (1.0 - binary_entropy(e1))));
    return pt;
}

DecoyRatePoint decoy_rate_untagged(const PassiveSchemeParams& scheme, const ChannelParams& ch,
                                   const DecoySettings& settings, const ThresholdWindow& w,
                                   double one_minus_delta_s, double one_minus_delta_d) {
    settings.validate(scheme);
    w.validate();
    PassiveSchemeParams at_signal = scheme;
    at_signal.lambda = settings.lambda_s;
    PassiveSchemeParams at_decoy = scheme;
    at_decoy.lambda = settings.lambda_d;
    const double la_s = lambda_A(at_signal).value;
    const double la_d = lambda_A(at_decoy).value;

    // Beyond ~20 means plus a margin the photon-number probabilities are far
    // below double precision and cannot move r.
    const double mean_top = static_cast<double>(w.m2) * la_s;
    const auto max_photon = std::min<std::int64_t>(w.m2, static_cast<std::int64_t>(std::ceil(20.0 * mean_top)) + 64);

    return decoy_rate_bracketed(window_bracket(w, la_s), window_bracket(w, la_d),
                                channel_gain_qber(settings.nu_s, ch), channel_gain_qber(settings.nu_d, ch), ch,
                                one_minus_delta_s, one_minus_delta_d, settings.f_ec, max_photon);
}

DecoyRatePoint trusted_decoy_rate(const ChannelParams& ch, const DecoySettings& settings) {
    const double s = settings.nu_s;
    const double d = settings.nu_d;
    if (!(d > 0.0 && d < s)) throw InvalidArgument("trusted_decoy_rate: need 0 < nu_d < nu_s");
    const auto obs_s = channel_gain_qber(s, ch);
    const auto obs_d = channel_gain_qber(d, ch);
    DecoyRatePoint pt;
    pt.L = ch.L;
    pt.Q = obs_s.Q;
    pt.E = obs_s.E;
    pt.delta_bar = 1.0;

    const double y1 = s / (s * d - d * d) *
                      (obs_d.Q * std::exp(d) - obs_s.Q * std::exp(s) * d * d / (s * s) - (s * s - d * d) / (s * s) * ch.Y0);
    if (!(y1 > 0.0)) {
        pt.diagnostic = "single-photon yield bound is not positive";
        return pt;
    }
    const double e1 = std::clamp((obs_d.E * obs_d.Q * std::exp(d) - ch.e0 * ch.Y0) / (y1 * d), 0.0, 0.5);
    pt.Y1_lower = std::min(y1, 1.0);
    pt.e1_upper = e1;
    pt.Q1_lower = pt.Y1_lower * s * std::exp(-s);
    pt.delta_bar = std::clamp(1.0 - pt.Q1_lower / obs_s.Q, 0.0, 1.0);
    pt.rate = std::max(0.0, 0.5 * (-obs_s.Q * settings.f_ec * binary_entropy(obs_s.E) +
                                   pt.Q1_lower * (1.0 - binary_entropy(e1))));
    return pt;
}

std::optional<double> secure_distance_threshold(const std::function<double(double)>& rate_at, double L_lo,
                                                double L_hi, double tol) {
    if (!(L_hi >= L_lo)) throw InvalidArgument("secure_distance_threshold: empty interval");
    if (!(rate_at(L_lo) > 0.0)) return std::nullopt;
    if (rate_at(L_hi) > 0.0) return L_hi;
    double lo = L_lo;
    double hi = L_hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (rate_at(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace uqkd
