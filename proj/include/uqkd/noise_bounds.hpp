#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace uqkd {

/// Photoelectron thresholds of the two comparators; a reading m' counts when
/// m1 <= m' <= m2.
struct ThresholdWindow {
    std::int64_t m1 = 0;
    std::int64_t m2 = 1;

    std::int64_t width() const { return m2 - m1; }
    void validate() const;

    bool operator==(const ThresholdWindow&) const = default;
};

struct NoNoise {};
struct PoissonianNoise {
    double gamma = 0.0;  // mean dark counts per gate
};
struct GaussianNoise {
    double sigma2 = 0.0;  // variance, photoelectron^2
};

/// Detection noise known to Alice and independent of the signal. The two
/// kinds are never combined.
using NoiseModel = std::variant<NoNoise, PoissonianNoise, GaussianNoise>;

void validate(const NoiseModel& noise);
std::string describe(const NoiseModel& noise);

/// Lower bound on the untagged fraction together with a flag raised when the
/// bound's denominator collapsed and 0 was returned.
struct UntaggedBound {
    double value = 0.0;
    bool degenerate = false;
};

/// Largest probability that Poisson(gamma) noise lifts a reading with m < m1
/// into the window: max over m in [0, m1-1] of P(m1-m <= d <= m2-m). Zero when
/// m1 = 0.
double poisson_bbar(const ThresholdWindow& w, double gamma);

/// P(d <= m2) for d ~ Poisson(gamma).
double poisson_b(std::int64_t m2, double gamma);

UntaggedBound untagged_lower_bound_poisson(double p_measured_lower, const ThresholdWindow& w, double gamma);

struct GaussianCoefficients {
    double b1 = 0.0;  // integral of G over [0, m2-m1]
    double b2 = 0.0;  // integral of G over [-(m2-m1)/2, (m2-m1)/2]
    double b3 = 0.0;  // integral of G over [m1-m2-1, -1]
};

GaussianCoefficients gaussian_b123(const ThresholdWindow& w, double sigma2);

UntaggedBound untagged_lower_bound_gaussian(double p_measured_lower, const ThresholdWindow& w, double sigma2);

/// Dispatches on the noise model; without noise the measured lower bound is
/// itself the bound.
UntaggedBound untagged_lower_bound(double p_measured_lower, const ThresholdWindow& w, const NoiseModel& noise);

}  // namespace uqkd
