#include "uqkd/confidence.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "uqkd/errors.hpp"

namespace uqkd {

double binomial_tail_at_least(std::int64_t k, std::int64_t trials, double p) {
    if (k <= 0) return 1.0;
    if (k > trials) return 0.0;
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    return boost::math::ibeta(static_cast<double>(k), static_cast<double>(trials - k + 1), p);
}

double binomial_tail_at_most(std::int64_t k, std::int64_t trials, double p) {
    if (k < 0) return 0.0;
    if (k >= trials) return 1.0;
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    return boost::math::ibetac(static_cast<double>(k + 1), static_cast<double>(trials - k), p);
}

namespace {

// Root of a monotone function on [0,1]. `below(p)` is true on the side of
// the root that contains 0. Returns the bracket after convergence.
template <class Below>
std::pair<double, double> bisect(Below below) {
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (below(mid))
            lo = mid;
        else
            hi = mid;
    }
    return {lo, hi};
}

}  // namespace

ConfidenceResult clopper_pearson(std::int64_t successes, std::int64_t trials, double alpha) {
    if (trials < 1) throw InvalidArgument("clopper_pearson: trials must be positive");
    if (successes < 0 || successes > trials)
        throw InvalidArgument("clopper_pearson: successes outside [0, trials]");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("clopper_pearson: alpha must lie in (0,1)");

    const double half = alpha / 2.0;
    ConfidenceResult out;
    out.level = 1.0 - alpha;
    if (successes > 0) {
        // P(X >= x | p) increases with p.
        out.lower = bisect([&](double p) { return binomial_tail_at_least(successes, trials, p) < half; }).first;
    }
    if (successes < trials) {
        // P(X <= x | p) decreases with p.
        out.upper = bisect([&](double p) { return binomial_tail_at_most(successes, trials, p) > half; }).second;
    }
    return out;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("normal_quantile: p must lie in (0,1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

ApnInterval apn_interval(std::span<const double> records, double xi, double alpha) {
    if (records.size() < 2) throw InvalidArgument("apn_interval: need at least two records");
    if (!(xi > 0.0 && xi <= 1.0)) throw InvalidArgument("apn_interval: xi must lie in (0,1]");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("apn_interval: alpha must lie in (0,1)");

    const double n = static_cast<double>(records.size());
    const double mean = std::accumulate(records.begin(), records.end(), 0.0) / n;
    double ss = 0.0;
    for (double r : records) ss += (r - mean) * (r - mean);
    const double var = ss / (n - 1.0);

    ApnInterval out;
    out.record_mean = mean;
    out.record_variance = var;
    if (var == 0.0) {
        out.degenerate = true;
        out.mu_lower = out.mu_upper = mean / xi;
        return out;
    }
    const double half_width = normal_quantile(1.0 - alpha / 2.0) * std::sqrt(var / n);
    out.mu_lower = (mean - half_width) / xi;
    out.mu_upper = (mean + half_width) / xi;
    return out;
}

}  // namespace uqkd
