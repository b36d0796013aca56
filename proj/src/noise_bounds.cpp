#include "uqkd/noise_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "uqkd/errors.hpp"
#include "uqkd/photon_stats.hpp"

namespace uqkd {

namespace {

constexpr double kDegenerateDenominator = 1e-15;
// Rounding allowance on the ordering assertions between noise coefficients.
constexpr double kOrderingSlack = 1e-12;
// Below this many candidate offsets b-bar is found by exhaustive scan.
constexpr std::int64_t kFullScanLimit = 4096;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

UntaggedBound ratio_bound(double numerator, double denominator) {
    if (denominator < kDegenerateDenominator) return {0.0, true};
    return {std::clamp(numerator / denominator, 0.0, 1.0), false};
}

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("measured lower bound must lie in [0,1]");
}

}  // namespace

void ThresholdWindow::validate() const {
    if (m1 < 0) throw InvalidArgument("threshold window: m1 must be non-negative");
    if (m2 <= m1) throw InvalidArgument("threshold window: m2 must exceed m1");
}

void validate(const NoiseModel& noise) {
    std::visit(Overloaded{
                   [](const NoNoise&) {},
                   [](const PoissonianNoise& n) {
                       if (!(n.gamma > 0.0) || !std::isfinite(n.gamma))
                           throw InvalidArgument("Poissonian noise: gamma must be positive");
                   },
                   [](const GaussianNoise& n) {
                       if (!(n.sigma2 > 0.0) || !std::isfinite(n.sigma2))
                           throw InvalidArgument("Gaussian noise: sigma2 must be positive");
                   },
               },
               noise);
}

std::string describe(const NoiseModel& noise) {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const NoNoise&) { os << "none"; },
                   [&](const PoissonianNoise& n) { os << "poisson(gamma=" << n.gamma << ")"; },
                   [&](const GaussianNoise& n) { os << "gaussian(sigma2=" << n.sigma2 << ")"; },
               },
               noise);
    return os.str();
}

double poisson_bbar(const ThresholdWindow& w, double gamma) {
    w.validate();
    if (!(gamma > 0.0)) throw InvalidArgument("poisson_bbar: gamma must be positive");
    if (w.m1 == 0) return 0.0;

    const std::int64_t width = w.width();
    // Offset s = m1 - m ranges over [1, m1]; the noise must land in [s, s + width].
    auto window_at = [&](std::int64_t s) { return poisson_window_mass(gamma, s, s + width); };

    if (w.m1 <= kFullScanLimit) {
        double best = 0.0;
        for (std::int64_t s = 1; s <= w.m1; ++s) best = std::max(best, window_at(s));
        return best;
    }

    // Window sums of a log-concave pmf are unimodal in the offset; they grow
    // while N(s + width + 1) > N(s). Locate the first s where that fails.
    const double log_gamma = std::log(gamma);
    auto grows = [&](std::int64_t s) {
        const double ds = static_cast<double>(s);
        const double dw = static_cast<double>(width);
        const double log_ratio =
            (dw + 1.0) * log_gamma - (std::lgamma(ds + dw + 2.0) - std::lgamma(ds + 1.0));
        return log_ratio > 0.0;
    };
    std::int64_t lo = 1;
    std::int64_t hi = w.m1;
    if (grows(hi)) {
        lo = hi;
    } else {
        while (hi - lo > 1) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            if (grows(mid))
                lo = mid;
            else
                hi = mid;
        }
    }
    double best = 0.0;
    for (std::int64_t s = std::max<std::int64_t>(1, lo - 2); s <= std::min(w.m1, lo + 3); ++s)
        best = std::max(best, window_at(s));
    return best;
}

double poisson_b(std::int64_t m2, double gamma) {
    if (!(gamma > 0.0)) throw InvalidArgument("poisson_b: gamma must be positive");
    if (m2 < 0) return 0.0;
    return boost::math::gamma_q(static_cast<double>(m2) + 1.0, gamma);
}

UntaggedBound untagged_lower_bound_poisson(double p_measured_lower, const ThresholdWindow& w, double gamma) {
    check_probability(p_measured_lower);
    const double bbar = poisson_bbar(w, gamma);
    const double b = poisson_b(w.m2, gamma);
    if (b + kOrderingSlack < bbar) throw NumericalError("poisson noise coefficients violate b(m2) >= b-bar");
    return ratio_bound(p_measured_lower - bbar, b - bbar);
}

GaussianCoefficients gaussian_b123(const ThresholdWindow& w, double sigma2) {
    w.validate();
    if (!(sigma2 > 0.0)) throw InvalidArgument("gaussian_b123: sigma2 must be positive");
    const double scale = std::sqrt(2.0 * sigma2);
    const double width = static_cast<double>(w.width());
    GaussianCoefficients c;
    c.b1 = 0.5 * boost::math::erf(width / scale);
    c.b2 = boost::math::erf(0.5 * width / scale);
    // Phi(-1/sigma) - Phi(-(width+1)/sigma), written with upper tails.
    c.b3 = 0.5 * (boost::math::erfc(1.0 / scale) - boost::math::erfc((width + 1.0) / scale));
    if (c.b2 + kOrderingSlack < c.b1 || c.b1 + kOrderingSlack < c.b3)
        throw NumericalError("gaussian noise coefficients violate b2 >= b1 >= b3");
    return c;
}

UntaggedBound untagged_lower_bound_gaussian(double p_measured_lower, const ThresholdWindow& w, double sigma2) {
    check_probability(p_measured_lower);
    const auto c = gaussian_b123(w, sigma2);
    return ratio_bound(p_measured_lower - c.b1, c.b2 - c.b1);
}

UntaggedBound untagged_lower_bound(double p_measured_lower, const ThresholdWindow& w, const NoiseModel& noise) {
    return std::visit(Overloaded{
                          [&](const NoNoise&) {
                              check_probability(p_measured_lower);
                              w.validate();
                              return UntaggedBound{p_measured_lower, false};
                          },
                          [&](const PoissonianNoise& n) { return untagged_lower_bound_poisson(p_measured_lower, w, n.gamma); },
                          [&](const GaussianNoise& n) { return untagged_lower_bound_gaussian(p_measured_lower, w, n.sigma2); },
                      },
                      noise);
}

}  // namespace uqkd
