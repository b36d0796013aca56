#pragma once

#include <cstdint>
#include <span>

namespace uqkd {

struct ConfidenceResult {
    double lower = 0.0;
    double upper = 1.0;
    double level = 0.0;  // 1 - alpha
};

/// P(X >= k) and P(X <= k) for X ~ Binomial(trials, p), through the
/// regularized incomplete beta function.
double binomial_tail_at_least(std::int64_t k, std::int64_t trials, double p);
double binomial_tail_at_most(std::int64_t k, std::int64_t trials, double p);

/// Exact two-sided Clopper-Pearson interval. Each endpoint is found by
/// bisection to well below 1e-12 in p and rounded outward, so the interval
/// never shrinks because of the root finder.
///
/// lower solves P(X >= successes | p) = alpha/2 (lower = 0 when successes = 0),
/// upper solves P(X <= successes | p) = alpha/2 (upper = 1 when successes = trials).
ConfidenceResult clopper_pearson(std::int64_t successes, std::int64_t trials, double alpha);

/// Standard normal quantile.
double normal_quantile(double p);

/// Interval on the source APN from power-meter records of the monitor
/// photoelectron mean. Endpoints are mean -/+ z(1-alpha/2) * s / sqrt(n),
/// divided by xi.
struct ApnInterval {
    double mu_lower = 0.0;
    double mu_upper = 0.0;
    double record_mean = 0.0;
    double record_variance = 0.0;
    bool degenerate = false;  // zero sample variance, interval collapsed to a point
};

ApnInterval apn_interval(std::span<const double> records, double xi, double alpha);

}  // namespace uqkd
