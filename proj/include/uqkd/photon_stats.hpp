#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace uqkd {

/// Photon-number distribution P(n) for n = 0..n_max, plus the probability
/// mass that lies beyond n_max. Downstream bounds treat the tail
/// pessimistically.
class PhotonNumberDistribution {
public:
    static constexpr double kNormTolerance = 1e-12;

    /// Throws InvalidArgument unless every entry is non-negative and
    /// sum(probs) + tail_mass is within kNormTolerance of 1.
    PhotonNumberDistribution(std::vector<double> probs, double tail_mass = 0.0);

    static PhotonNumberDistribution point_mass(std::size_t n);

    std::size_t n_max() const { return probs_.size() - 1; }
    std::span<const double> probs() const { return probs_; }
    double operator[](std::size_t n) const { return n < probs_.size() ? probs_[n] : 0.0; }
    double tail_mass() const { return tail_mass_; }

    /// Mean over the stored support. The tail contributes an unknown amount;
    /// callers inspect tail_mass() to judge whether that matters.
    double mean() const;

    /// Sum of P(n) over lo <= n <= hi, restricted to the stored support.
    double window_mass(std::size_t lo, std::size_t hi) const;

private:
    std::vector<double> probs_;
    double tail_mass_ = 0.0;
};

/// Beam-splitter / detector / attenuator parameters of the passive monitor.
struct PassiveSchemeParams {
    double t_B = 0.0;     // beam-splitter transmittance toward the monitor
    double t_D = 1.0;     // monitor detector efficiency
    double lambda = 1.0;  // attenuator transmittance
    double mu = 0.0;      // source APN at the input of Alice's station

    double xi() const { return t_B * t_D; }
    double eta() const { return lambda * (1.0 - t_B); }
    double lambda_a() const { return (1.0 - t_B) * lambda / (t_B * t_D); }

    /// Throws InvalidArgument on out-of-range fields or lambda_a() > 1.
    void validate() const;
};

/// Tail tolerance used by poisson_pnd.
inline constexpr double kPoissonTailTolerance = 1e-12;

/// Default truncation point for a Poisson source of the given mean.
std::size_t auto_n_max(double mean);

/// Poisson(mu) truncated at n_max (auto-selected when absent). Throws
/// NumericalError if the resulting tail exceeds kPoissonTailTolerance.
PhotonNumberDistribution poisson_pnd(double mu, std::optional<std::size_t> n_max = std::nullopt);

/// Per-photon survival with probability t:
/// out[m] = sum_{n>=m} p[n] C(n,m) t^m (1-t)^(n-m). The input tail is carried
/// over unchanged.
PhotonNumberDistribution bernoulli_transform(const PhotonNumberDistribution& p, double t);

/// P(n > 1) with the tail counted as multiphoton.
double multiphoton_probability(const PhotonNumberDistribution& p);

/// Binomial(n, t) pmf at k evaluated in log space.
double binomial_pmf(std::size_t n, std::size_t k, double t);

/// Sum of Poisson(mean) mass over lo <= n <= hi via regularized incomplete
/// gamma functions; usable for means far beyond what a dense vector holds.
double poisson_window_mass(double mean, std::int64_t lo, std::int64_t hi);

}  // namespace uqkd
