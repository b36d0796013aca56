#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "uqkd/confidence.hpp"
#include "uqkd/errors.hpp"

using namespace uqkd;

TEST_CASE("Clopper-Pearson boundary cases") {
    for (double alpha : {0.1, 0.05, 1e-6}) {
        for (std::int64_t M : {1, 7, 1000, 100000000}) {
            const auto none = clopper_pearson(0, M, alpha);
            CHECK(none.lower == 0.0);
            const auto all = clopper_pearson(M, M, alpha);
            CHECK(all.upper == 1.0);
            CHECK(std::abs(all.lower - std::pow(alpha / 2.0, 1.0 / static_cast<double>(M))) < 1e-12);
            CHECK(all.level == doctest::Approx(1.0 - alpha));
        }
    }
}

TEST_CASE("Clopper-Pearson M=10, x=3") {
    const auto ci = clopper_pearson(3, 10, 0.05);
    // 40-digit root of the exact tail sums
    CHECK(std::abs(ci.lower - 0.066739511177734467) < 1e-12);
    CHECK(std::abs(ci.upper - 0.65245285005999730) < 1e-12);
}

TEST_CASE("Clopper-Pearson matches brute-force tail sums") {
    for (double alpha : {0.1, 0.01}) {
        for (int M = 1; M <= 20; ++M) {
            for (int x = 0; x <= M; ++x) {
                const auto ci = clopper_pearson(x, M, alpha);
                if (x > 0) {
                    const double ref = oracle::bisect_increasing([&](double p) { return oracle::binom_at_least(x, M, p); }, alpha / 2);
                    CHECK(std::abs(ci.lower - ref) < 1e-10);
                }
                if (x < M) {
                    const double ref = oracle::bisect_increasing([&](double p) { return -oracle::binom_at_most(x, M, p); }, -alpha / 2);
                    CHECK(std::abs(ci.upper - ref) < 1e-10);
                }
                CHECK(ci.lower <= ci.upper);
            }
        }
    }
}

TEST_CASE("Clopper-Pearson monotonicity") {
    const std::int64_t M = 200;
    double prev_lo = -1.0, prev_hi = -1.0;
    for (std::int64_t x = 0; x <= M; ++x) {
        const auto ci = clopper_pearson(x, M, 0.05);
        CHECK(ci.lower >= prev_lo);
        CHECK(ci.upper >= prev_hi);
        prev_lo = ci.lower;
        prev_hi = ci.upper;
    }
    double prev_width = 2.0;
    for (std::int64_t m : {10, 100, 1000, 10000, 100000}) {
        const auto ci = clopper_pearson(3 * m / 10, m, 0.05);
        CHECK(ci.upper - ci.lower < prev_width);
        prev_width = ci.upper - ci.lower;
    }
}

TEST_CASE("Clopper-Pearson errors") {
    CHECK_THROWS_AS(clopper_pearson(-1, 10, 0.05), InvalidArgument);
    CHECK_THROWS_AS(clopper_pearson(11, 10, 0.05), InvalidArgument);
    CHECK_THROWS_AS(clopper_pearson(1, 0, 0.05), InvalidArgument);
    CHECK_THROWS_AS(clopper_pearson(1, 10, 0.0), InvalidArgument);
    CHECK_THROWS_AS(clopper_pearson(1, 10, 1.0), InvalidArgument);
}

TEST_CASE("binomial tails via incomplete beta") {
    for (int M : {5, 12, 20}) {
        for (int k = 0; k <= M; ++k) {
            for (double p : {0.01, 0.3, 0.77}) {
                CHECK(binomial_tail_at_least(k, M, p) == doctest::Approx(oracle::binom_at_least(k, M, p)).epsilon(1e-12));
                CHECK(binomial_tail_at_most(k, M, p) == doctest::Approx(oracle::binom_at_most(k, M, p)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("normal quantile") {
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
    CHECK_THROWS_AS(normal_quantile(0.0), InvalidArgument);
}

TEST_CASE("apn_interval") {
    SUBCASE("constant records") {
        const std::vector<double> rec(10, 684.0);
        const auto iv = apn_interval(rec, 0.684, 0.05);
        CHECK(iv.degenerate);
        CHECK(iv.mu_lower == doctest::Approx(1000.0));
        CHECK(iv.mu_upper == doctest::Approx(1000.0));
    }
    SUBCASE("xi = 1 leaves the record interval unscaled") {
        const std::vector<double> rec{1.0, 2.0, 3.0, 4.0};
        const auto iv = apn_interval(rec, 1.0, 0.05);
        const double half = 1.959963984540054 * std::sqrt((5.0 / 3.0) / 4.0);
        CHECK(iv.mu_lower == doctest::Approx(2.5 - half));
        CHECK(iv.mu_upper == doctest::Approx(2.5 + half));
        CHECK_FALSE(iv.degenerate);
    }
    SUBCASE("errors") {
        const std::vector<double> one{1.0};
        CHECK_THROWS_AS(apn_interval(one, 0.5, 0.05), InvalidArgument);
        const std::vector<double> two{1.0, 2.0};
        CHECK_THROWS_AS(apn_interval(two, 0.0, 0.05), InvalidArgument);
    }
}

TEST_CASE("apn_interval coverage by simulation") {
    // 1e4 records per experiment, repeated; true <m> should be covered about
    // 1 - alpha of the time.
    const double xi = 0.684;
    const double true_mu = 1000.0;
    const double alpha = 0.1;
    std::mt19937_64 rng(123);
    std::normal_distribution<double> record(true_mu * xi, 30.0);
    const int experiments = 1000;
    int covered = 0;
    std::vector<double> rec(10000);
    for (int e = 0; e < experiments; ++e) {
        for (auto& r : rec) r = record(rng);
        const auto iv = apn_interval(rec, xi, alpha);
        if (iv.mu_lower <= true_mu && true_mu <= iv.mu_upper) ++covered;
    }
    const double rate = static_cast<double>(covered) / experiments;
    const double se = std::sqrt(alpha * (1 - alpha) / experiments);
    CHECK(std::abs(rate - (1.0 - alpha)) < 4.0 * se);
}

TEST_CASE("Clopper-Pearson coverage is conservative") {
    const int M = 200;
    const double p = 0.3;
    const double alpha = 0.05;
    std::mt19937_64 rng(77);
    std::binomial_distribution<int> draw(M, p);
    const int trials = 10000;
    int covered = 0;
    for (int i = 0; i < trials; ++i) {
        const auto ci = clopper_pearson(draw(rng), M, alpha);
        if (ci.lower <= p && p <= ci.upper) ++covered;
    }
    const double se = std::sqrt(alpha * (1 - alpha) / trials);
    CHECK(static_cast<double>(covered) / trials >= 1.0 - alpha - 3.0 * se);
}
