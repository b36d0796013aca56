#include "uqkd/photon_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "uqkd/errors.hpp"

namespace uqkd {

PhotonNumberDistribution::PhotonNumberDistribution(std::vector<double> probs, double tail_mass)
    : probs_(std::move(probs)), tail_mass_(tail_mass) {
    if (probs_.empty()) throw InvalidArgument("photon-number distribution needs at least one entry");
    if (!(tail_mass_ >= 0.0)) throw InvalidArgument("tail mass must be non-negative");
    double total = tail_mass_;
    for (std::size_t n = 0; n < probs_.size(); ++n) {
        if (!(probs_[n] >= 0.0))
            throw InvalidArgument("negative or NaN probability at n=" + std::to_string(n));
        total += probs_[n];
    }
    if (std::abs(total - 1.0) > kNormTolerance)
        throw InvalidArgument("photon-number distribution not normalized (total mass " +
                              std::to_string(total) + ")");
}

PhotonNumberDistribution PhotonNumberDistribution::point_mass(std::size_t n) {
    std::vector<double> probs(n + 1, 0.0);
    probs[n] = 1.0;
    return PhotonNumberDistribution(std::move(probs));
}

double PhotonNumberDistribution::mean() const {
    double acc = 0.0;
    for (std::size_t n = 1; n < probs_.size(); ++n) acc += static_cast<double>(n) * probs_[n];
    return acc;
}

double PhotonNumberDistribution::window_mass(std::size_t lo, std::size_t hi) const {
    if (lo > hi || lo >= probs_.size()) return 0.0;
    hi = std::min(hi, probs_.size() - 1);
    return std::accumulate(probs_.begin() + static_cast<std::ptrdiff_t>(lo),
                           probs_.begin() + static_cast<std::ptrdiff_t>(hi) + 1, 0.0);
}

void PassiveSchemeParams::validate() const {
    if (!(t_B > 0.0 && t_B < 1.0)) throw InvalidArgument("t_B must lie in (0,1)");
    if (!(t_D > 0.0 && t_D <= 1.0)) throw InvalidArgument("t_D must lie in (0,1]");
    if (!(lambda > 0.0 && lambda <= 1.0)) throw InvalidArgument("lambda must lie in (0,1]");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("mu must be positive");
    if (lambda_a() > 1.0)
        throw InvalidArgument("lambda^A = (1-t_B)*lambda/(t_B*t_D) exceeds 1");
}

std::size_t auto_n_max(double mean) {
    return static_cast<std::size_t>(std::ceil(mean + 12.0 * std::sqrt(mean) + 20.0));
}

PhotonNumberDistribution poisson_pnd(double mu, std::optional<std::size_t> n_max) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("poisson_pnd: mu must be positive");
    const std::size_t top = n_max.value_or(auto_n_max(mu));
    std::vector<double> probs(top + 1);
    const double log_mu = std::log(mu);
    for (std::size_t n = 0; n <= top; ++n) {
        const double dn = static_cast<double>(n);
        probs[n] = std::exp(-mu + dn * log_mu - std::lgamma(dn + 1.0));
    }
    // Evaluated directly rather than as 1 - sum(probs), which cancels to
    // rounding noise for the tolerances in play.
    const double tail = boost::math::gamma_p(static_cast<double>(top) + 1.0, mu);
    if (tail > kPoissonTailTolerance)
        throw NumericalError("poisson_pnd: n_max=" + std::to_string(top) +
                             " leaves tail mass " + std::to_string(tail) + " above tolerance");
    return PhotonNumberDistribution(std::move(probs), tail);
}

double binomial_pmf(std::size_t n, std::size_t k, double t) {
    if (k > n) return 0.0;
    if (t <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (t >= 1.0) return k == n ? 1.0 : 0.0;
    const double dn = static_cast<double>(n);
    const double dk = static_cast<double>(k);
    const double log_c = std::lgamma(dn + 1.0) - std::lgamma(dk + 1.0) - std::lgamma(dn - dk + 1.0);
    return std::exp(log_c + dk * std::log(t) + (dn - dk) * std::log1p(-t));
}

PhotonNumberDistribution bernoulli_transform(const PhotonNumberDistribution& p, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("bernoulli_transform: t must lie in [0,1]");
    const auto in = p.probs();
    const std::size_t size = in.size();
    std::vector<double> out(size, 0.0);
    if (t == 1.0) {
        out.assign(in.begin(), in.end());
    } else if (t == 0.0) {
        out[0] = std::accumulate(in.begin(), in.end(), 0.0);
    } else {
        std::vector<double> log_fact(size);
        for (std::size_t n = 0; n < size; ++n) log_fact[n] = std::lgamma(static_cast<double>(n) + 1.0);
        const double log_t = std::log(t);
        const double log_s = std::log1p(-t);
        for (std::size_t n = 0; n < size; ++n) {
            if (in[n] == 0.0) continue;
            const double base = log_fact[n];
            for (std::size_t m = 0; m <= n; ++m) {
                const double log_term = base - log_fact[m] - log_fact[n - m] +
                                        static_cast<double>(m) * log_t +
                                        static_cast<double>(n - m) * log_s;
                out[m] += in[n] * std::exp(log_term);
            }
        }
    }
    return PhotonNumberDistribution(std::move(out), p.tail_mass());
}

double multiphoton_probability(const PhotonNumberDistribution& p) {
    const auto probs = p.probs();
    double acc = p.tail_mass();
    for (std::size_t n = 2; n < probs.size(); ++n) acc += probs[n];
    return std::min(acc, 1.0);
}

double poisson_window_mass(double mean, std::int64_t lo, std::int64_t hi) {
    if (!(mean > 0.0)) throw InvalidArgument("poisson_window_mass: mean must be positive");
    lo = std::max<std::int64_t>(lo, 0);
    if (hi < lo) return 0.0;
    const double a = static_cast<double>(lo);
    const double b = static_cast<double>(hi) + 1.0;
    // P(lo <= N <= hi) = P(N >= lo) - P(N >= hi+1) = P(N <= hi) - P(N <= lo-1).
    // Use whichever pair of tails is small on the side of the mode.
    if (a > mean) {
        const double upper_lo = lo == 0 ? 1.0 : boost::math::gamma_p(a, mean);
        return std::max(0.0, upper_lo - boost::math::gamma_p(b, mean));
    }
    const double cdf_hi = boost::math::gamma_q(b, mean);
    const double cdf_below = lo == 0 ? 0.0 : boost::math::gamma_q(a, mean);
    return std::max(0.0, cdf_hi - cdf_below);
}

}  // namespace uqkd
