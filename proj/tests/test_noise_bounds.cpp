#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "uqkd/errors.hpp"
#include "uqkd/noise_bounds.hpp"

using namespace uqkd;

namespace {

// max over m < m1 of P(m1-m <= d <= m2-m) with d ~ Poisson(gamma), pmf by recurrence
double bbar_oracle(std::int64_t m1, std::int64_t m2, double gamma) {
    const auto pmf = oracle::poisson(gamma, static_cast<std::size_t>(m2) + 1);
    double best = 0.0;
    for (std::int64_t m = 0; m < m1; ++m) {
        double s = 0.0;
        for (std::int64_t d = m1 - m; d <= m2 - m; ++d) s += pmf[static_cast<std::size_t>(d)];
        best = std::max(best, s);
    }
    return best;
}

}  // namespace

TEST_CASE("window validation") {
    CHECK_THROWS_AS((ThresholdWindow{5, 5}.validate()), InvalidArgument);
    CHECK_THROWS_AS((ThresholdWindow{-1, 5}.validate()), InvalidArgument);
    CHECK_NOTHROW((ThresholdWindow{0, 1}.validate()));
    CHECK(ThresholdWindow{3, 10}.width() == 7);
}

TEST_CASE("noise model validation and description") {
    CHECK_NOTHROW(validate(NoiseModel{NoNoise{}}));
    CHECK_THROWS_AS(validate(NoiseModel{PoissonianNoise{0.0}}), InvalidArgument);
    CHECK_THROWS_AS(validate(NoiseModel{GaussianNoise{-1.0}}), InvalidArgument);
    CHECK(describe(NoiseModel{NoNoise{}}) == "none");
    CHECK(describe(NoiseModel{PoissonianNoise{4000}}).find("poisson") == 0);
}

TEST_CASE("poisson b-bar against direct scan") {
    CHECK(std::abs(poisson_bbar({3, 7}, 5.0) - 0.74197630644691156) < 1e-12);
    CHECK(poisson_bbar({0, 7}, 5.0) == 0.0);
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> m1d(1, 60), wd(1, 40);
    std::uniform_real_distribution<double> gd(0.1, 40.0);
    for (int i = 0; i < 100; ++i) {
        const std::int64_t m1 = m1d(rng), m2 = m1 + wd(rng);
        const double g = gd(rng);
        CHECK(poisson_bbar({m1, m2}, g) == doctest::Approx(bbar_oracle(m1, m2, g)).epsilon(1e-11));
    }
}

TEST_CASE("poisson b-bar binary search agrees with full scan") {
    // m1 beyond the exhaustive-scan limit; compare against a scan done here
    for (double g : {100.0, 4000.0, 5200.0}) {
        const ThresholdWindow w{5000, 5400};
        const double fast = poisson_bbar(w, g);
        double scan = 0.0;
        const auto pmf_top = static_cast<std::size_t>(w.m1 + w.width() + 1);
        std::vector<double> logp(pmf_top + 1);
        for (std::size_t n = 0; n <= pmf_top; ++n)
            logp[n] = -g + static_cast<double>(n) * std::log(g) - std::lgamma(static_cast<double>(n) + 1.0);
        std::vector<double> cum(pmf_top + 2, 0.0);
        for (std::size_t n = 0; n <= pmf_top; ++n) cum[n + 1] = cum[n] + std::exp(logp[n]);
        for (std::int64_t s = 1; s <= w.m1; ++s)
            scan = std::max(scan, cum[static_cast<std::size_t>(s + w.width() + 1)] - cum[static_cast<std::size_t>(s)]);
        CHECK(fast == doctest::Approx(scan).epsilon(1e-9));
    }
}

TEST_CASE("poisson b") {
    CHECK(std::abs(poisson_b(1000000, 1e6) - 0.50026596148628365) < 1e-12);
    const auto pmf = oracle::poisson(3.0, 10);
    double s = 0.0;
    for (int i = 0; i <= 4; ++i) s += pmf[static_cast<std::size_t>(i)];
    CHECK(poisson_b(4, 3.0) == doctest::Approx(s).epsilon(1e-13));
    CHECK(poisson_b(-1, 3.0) == 0.0);
}

TEST_CASE("poisson ordering b >= b-bar") {
    for (double g : {0.5, 5.0, 50.0, 500.0})
        for (std::int64_t m1 : {1, 10, 100, 1000})
            for (std::int64_t width : {1, 10, 100}) {
                const ThresholdWindow w{m1, m1 + width};
                CHECK(poisson_b(w.m2, g) + 1e-12 >= poisson_bbar(w, g));
            }
}

TEST_CASE("gaussian coefficients match quadrature") {
    const GaussianCoefficients c = gaussian_b123({677160, 690840}, 1e9);
    CHECK(std::abs(c.b1 - 0.16734715410894940) < 1e-12);
    CHECK(std::abs(c.b2 - 0.17124592877791243) < 1e-12);
    CHECK(std::abs(c.b3 - 0.16734602711328306) < 1e-12);

    for (double sigma2 : {0.5, 4.0, 100.0, 1e4}) {
        for (std::int64_t width : {1, 7, 40, 300}) {
            const ThresholdWindow w{1000, 1000 + width};
            const auto g = gaussian_b123(w, sigma2);
            auto G = [&](double x) { return oracle::gaussian_density(x, sigma2); };
            const double W = static_cast<double>(width);
            CHECK(g.b1 == doctest::Approx(oracle::simpson(G, 0.0, W, 1e-14)).epsilon(1e-9));
            CHECK(g.b2 == doctest::Approx(oracle::simpson(G, -W / 2, W / 2, 1e-14)).epsilon(1e-9));
            CHECK(g.b3 == doctest::Approx(oracle::simpson(G, -W - 1, -1.0, 1e-14)).epsilon(1e-9));
            CHECK(g.b2 >= g.b1);
            CHECK(g.b1 >= g.b3);
        }
    }
}

TEST_CASE("gaussian coefficient limits") {
    const auto tiny = gaussian_b123({10, 20}, 1e-6);
    CHECK(tiny.b1 == doctest::Approx(0.5));
    CHECK(tiny.b2 == doctest::Approx(1.0));
    CHECK(tiny.b3 == doctest::Approx(0.0));
    const auto huge = gaussian_b123({10, 20}, 1e20);
    CHECK(huge.b1 < 1e-8);
    CHECK(huge.b2 < 1e-8);
}

TEST_CASE("untagged lower bound") {
    const ThresholdWindow w{677160, 690840};
    SUBCASE("no noise passes the measurement through") {
        const auto u = untagged_lower_bound(0.93, w, NoNoise{});
        CHECK(u.value == 0.93);
        CHECK_FALSE(u.degenerate);
    }
    SUBCASE("poisson noise without shift reproduces p") {
        const auto u = untagged_lower_bound(0.93, {0, 50}, PoissonianNoise{1e-9});
        CHECK(u.value == doctest::Approx(0.93).epsilon(1e-8));
    }
    SUBCASE("poisson formula") {
        const ThresholdWindow small{3, 7};
        const double bbar = poisson_bbar(small, 5.0), b = poisson_b(7, 5.0);
        const auto u = untagged_lower_bound(0.8, small, PoissonianNoise{5.0});
        CHECK(u.value == doctest::Approx((0.8 - bbar) / (b - bbar)));
    }
    SUBCASE("gaussian formula") {
        const auto c = gaussian_b123(w, 1e9);
        const auto u = untagged_lower_bound(0.9, w, GaussianNoise{1e9});
        CHECK(u.value == doctest::Approx(std::clamp((0.9 - c.b1) / (c.b2 - c.b1), 0.0, 1.0)));
    }
    SUBCASE("clamped to [0,1]") {
        CHECK(untagged_lower_bound(0.0, w, GaussianNoise{1e6}).value == 0.0);
        CHECK(untagged_lower_bound(1.0, w, GaussianNoise{1e6}).value <= 1.0);
    }
    SUBCASE("degenerate denominator") {
        const auto u = untagged_lower_bound(0.5, {10, 20}, GaussianNoise{1e40});
        CHECK(u.degenerate);
        CHECK(u.value == 0.0);
    }
    SUBCASE("argument checks") {
        CHECK_THROWS_AS(untagged_lower_bound(1.5, w, NoNoise{}), InvalidArgument);
        CHECK_THROWS_AS(untagged_lower_bound(0.5, {5, 4}, NoNoise{}), InvalidArgument);
    }
}

TEST_CASE("untagged bound is monotone in the measured bound") {
    const ThresholdWindow w{100, 160};
    for (const NoiseModel& n : {NoiseModel{PoissonianNoise{20.0}}, NoiseModel{GaussianNoise{50.0}}}) {
        double prev = -1.0;
        for (int i = 0; i <= 100; ++i) {
            const double v = untagged_lower_bound(i / 100.0, w, n).value;
            CHECK(v >= prev);
            prev = v;
        }
    }
}
