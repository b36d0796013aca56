#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "uqkd/noise_bounds.hpp"
#include "uqkd/photon_stats.hpp"

namespace uqkd {

struct ChannelParams {
    double eta_B = 1.0;         // Bob's detection efficiency
    double alpha_prime = 0.21;  // fiber loss, dB/km
    double Y0 = 0.0;            // dark-count rate
    double e_det = 0.0;         // misalignment error
    double e0 = 0.5;            // error rate of dark counts
    double L = 0.0;             // fiber length, km

    double eta_f() const;
    void validate() const;
};

double binary_entropy(double x);

struct GainQber {
    double Q = 0.0;
    double E = 0.0;
    bool degenerate = false;  // Q == 0, E undefined (reported as e0)
};

/// Overall gain and QBER for a Poisson pulse of mean mu_p2 leaving Alice.
GainQber channel_gain_qber(double mu_p2, const ChannelParams& ch);

/// 1/2 Q { -f H2(E) + (1-D)[1 - H2(E/(1-D))] }, floored at 0. Zero when D >= 1;
/// the untagged term vanishes once E/(1-D) exceeds 1/2.
double gllp_rate(double Q, double E, double delta_bar, double f_ec);

struct RatePoint {
    double L = 0.0;
    double rate = 0.0;
    double delta_bar = 0.0;
    double Q = 0.0;
    double E = 0.0;
};

/// Tagged-fraction bound for the APN monitor: worst-case multiphoton
/// probability at mu_upper over the gain of the honest source.
double apn_delta_bar(const PassiveSchemeParams& scheme, const ChannelParams& ch, double mu_upper);
RatePoint apn_rate_bb84(const PassiveSchemeParams& scheme, const ChannelParams& ch, double mu_upper, double f_ec);

/// Same, for a precomputed worst-case multiphoton bound.
RatePoint apn_rate_bb84_from_bound(const PassiveSchemeParams& scheme, const ChannelParams& ch,
                                   double p_multi_upper, double f_ec);

/// [1 - (1 + mu_p2) e^-mu_p2] / Q for a known Poisson source.
double trusted_delta_bar(double mu_p2, const ChannelParams& ch);
RatePoint trusted_rate_bb84(double mu_p2, const ChannelParams& ch, double f_ec);

enum class SchemeCase { I, II, III };
const char* to_string(SchemeCase c);

struct LambdaA {
    double value = 0.0;
    SchemeCase case_id = SchemeCase::I;
};

/// Effective transmittance from the monitor reference position to Alice's
/// output, with the beam-splitter case it falls under.
LambdaA lambda_A(const PassiveSchemeParams& scheme);

/// Untagged pulses carry n in [m1, m2] photons at the reference position and
/// are thinned by lambda^A; tagged pulses are counted as fully insecure.
RatePoint pna_rate_bb84(const PassiveSchemeParams& scheme, const ChannelParams& ch, const ThresholdWindow& w,
                        double one_minus_delta, double f_ec);

struct DecoySettings {
    double nu_s = 0.5;
    double nu_d = 0.1;
    double lambda_s = 0.0;
    double lambda_d = 0.0;
    double f_ec = 1.0;

    /// Ordering nu_d < nu_s, lambda_d < lambda_s <= t_B t_D / (1 - t_B), and
    /// lambda^A <= 1 for both settings.
    void validate(const PassiveSchemeParams& scheme) const;
};

struct DecoyRatePoint : RatePoint {
    double Y1_lower = 0.0;
    double e1_upper = 0.5;
    double Q1_lower = 0.0;
    std::string diagnostic;  // non-empty when a bound turned out infeasible
};

/// Bounds on an intensity's photon-number probabilities at Alice's output,
/// P(k) in [lower(k), upper(k)].
struct PhotonBracket {
    std::function<double(std::int64_t)> lower;
    std::function<double(std::int64_t)> upper;
};

/// Poisson(nu) exactly.
PhotonBracket poisson_bracket(double nu);

/// Untagged pulse: Binomial(n, lambda_a) with n somewhere in [m1, m2].
PhotonBracket window_bracket(const ThresholdWindow& w, double lambda_a);

/// Vacuum + weak decoy + signal estimation of the single-photon gain and error
/// rate from bracketed photon statistics, with tagged pulses under Eve's
/// control. `max_photon` caps the k >= 2 search for the multiphoton ratio.
DecoyRatePoint decoy_rate_bracketed(const PhotonBracket& signal, const PhotonBracket& decoy, const GainQber& obs_s,
                                    const GainQber& obs_d, const ChannelParams& ch, double one_minus_delta_s,
                                    double one_minus_delta_d, double f_ec, std::int64_t max_photon);

DecoyRatePoint decoy_rate_untagged(const PassiveSchemeParams& scheme, const ChannelParams& ch,
                                   const DecoySettings& settings, const ThresholdWindow& w,
                                   double one_minus_delta_s, double one_minus_delta_d);

/// Closed-form vacuum + weak decoy rate for a trusted Poisson source.
DecoyRatePoint trusted_decoy_rate(const ChannelParams& ch, const DecoySettings& settings);

/// Largest L in [L_lo, L_hi] with a positive rate, located by bisection to
/// `tol` km on a rate that is non-increasing in L. Empty if the rate is
/// already zero at L_lo.
std::optional<double> secure_distance_threshold(const std::function<double(double)>& rate_at, double L_lo,
                                                double L_hi, double tol = 1e-4);

}  // namespace uqkd
