#include <algorithm>
#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "doctest.h"
#include "uqkd/errors.hpp"
#include "uqkd/photon_stats.hpp"
#include "uqkd/worstcase.hpp"

using namespace uqkd;
using Wide = boost::multiprecision::cpp_bin_float_50;

namespace {

// 1 - (1-eta)^k - k eta (1-eta)^(k-1) evaluated verbatim in 50 digits.
double wide_a(std::int64_t k, double eta) {
    const Wide e(eta);
    const Wide kk(k);
    return static_cast<double>(1 - pow(1 - e, kk) - kk * e * pow(1 - e, kk - 1));
}

}  // namespace

TEST_CASE("coefficient_a") {
    SUBCASE("k = 2 is eta squared") {
        for (double eta : {1e-9, 1e-7, 1e-3, 0.3, 0.9}) CHECK(coefficient_a(2, eta) == doctest::Approx(eta * eta).epsilon(1e-13));
    }
    SUBCASE("approaches 1 for large k") { CHECK(coefficient_a(100000, 0.01) == doctest::Approx(1.0).epsilon(1e-14)); }
    SUBCASE("extended precision oracle") {
        CHECK(coefficient_a(1794, 1e-3) == doctest::Approx(wide_a(1794, 1e-3)).epsilon(1e-13));
        CHECK(coefficient_a(1794, 1e-3) == doctest::Approx(0.535494003463238).epsilon(1e-13));
        CHECK(coefficient_a(50, 1e-7) == doctest::Approx(1.2249960800069090e-11).epsilon(1e-12));
        CHECK(coefficient_a(1000000, 1e-7) == doctest::Approx(0.004678836088675548).epsilon(1e-12));
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> log_eta(-9.0, -0.3);
        std::uniform_real_distribution<double> log_k(0.31, 9.0);
        for (int i = 0; i < 200; ++i) {
            const double eta = std::pow(10.0, log_eta(rng));
            const auto k = static_cast<std::int64_t>(std::pow(10.0, log_k(rng)));
            if (k < 2) continue;
            CHECK(coefficient_a(k, eta) == doctest::Approx(wide_a(k, eta)).epsilon(1e-11));
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(coefficient_a(1, 0.5), InvalidArgument);
        CHECK_THROWS_AS(coefficient_a(3, 0.0), InvalidArgument);
        CHECK_THROWS_AS(coefficient_a(3, 1.0), InvalidArgument);
    }
}

TEST_CASE("maximize_ratio reported example") {
    const auto r = maximize_ratio(1e-3, 100.0);
    CHECK(r.k_star == 1794);
    CHECK(r.p_multi_upper == doctest::Approx(0.029849164072644259).epsilon(1e-12));
    CHECK(r.p_multi_upper == doctest::Approx(0.02985).epsilon(2e-4));
    CHECK(r.weight_k_star == doctest::Approx(100.0 / 1794.0));
    CHECK(r.weight_vacuum + r.weight_k_star == doctest::Approx(1.0));
    CHECK_FALSE(r.feasibility_clamped);
    CHECK(r.p_multi_upper == doctest::Approx(coefficient_a(r.k_star, 1e-3) * 100.0 / r.k_star).epsilon(1e-15));
}

TEST_CASE("maximize_ratio small eta example") {
    const auto r = maximize_ratio(1e-7, 1e6);
    // 50-digit scan: maximiser 17932822, value 0.0298425614126265643
    CHECK(std::abs(r.k_star - 17932822) <= 2);
    CHECK(r.p_multi_upper == doctest::Approx(0.029842561412626564).epsilon(1e-12));
    CHECK(r.p_multi_upper == doctest::Approx(0.029843).epsilon(2e-5));
}

TEST_CASE("maximize_ratio against exhaustive scan") {
    SUBCASE("eta = 0.5, mu = 2") {
        std::int64_t best_k = 0;
        double best = -1.0;
        for (std::int64_t k = 2; k <= 200; ++k) {
            const double v = wide_a(k, 0.5) / static_cast<double>(k);
            if (v > best) best = v, best_k = k;
        }
        const auto r = maximize_ratio(0.5, 2.0);
        CHECK(r.k_star == best_k);
        CHECK(r.p_multi_upper == doctest::Approx(best * 2.0).epsilon(1e-14));
        CHECK(r.p_multi_upper == doctest::Approx(0.34375));
    }
    SUBCASE("random instances") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> log_eta(-3.0, -0.2);
        std::uniform_real_distribution<double> frac(0.01, 1.5);
        for (int i = 0; i < 30; ++i) {
            const double eta = std::pow(10.0, log_eta(rng));
            const double mu = frac(rng) / eta;
            const auto cap = default_k_cap(eta);
            const auto lo = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(mu)));
            std::int64_t best_k = 0;
            double best = -1.0;
            for (std::int64_t k = lo; k <= cap; ++k) {
                const double v = coefficient_a(k, eta) / static_cast<double>(k);
                if (v > best) best = v, best_k = k;
            }
            const auto r = maximize_ratio(eta, mu);
            CHECK(r.k_star == best_k);
            CHECK(r.p_multi_upper == doctest::Approx(best * mu).epsilon(1e-15));
        }
    }
}

TEST_CASE("maximize_ratio errors and clamping") {
    CHECK_THROWS_AS(maximize_ratio(0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(maximize_ratio(0.1, 0.0), InvalidArgument);
    // cap below the maximiser (~1794 at eta = 1e-3)
    CHECK_THROWS_AS(maximize_ratio(1e-3, 100.0, 1000), NumericalError);
    CHECK_THROWS_AS(maximize_ratio(1e-3, 5000.0, 4000), NumericalError);
    // mu above the unconstrained maximiser: k >= mu binds
    const auto r = maximize_ratio(1e-3, 3000.0);
    CHECK(r.feasibility_clamped);
    CHECK(r.k_star >= 3000);
    CHECK(r.weight_vacuum >= 0.0);
}

TEST_CASE("worst case is monotone in mu and eta") {
    double prev = 0.0;
    for (double mu = 1.0; mu <= 1500.0; mu *= 1.3) {
        const double v = maximize_ratio(1e-3, mu).p_multi_upper;
        CHECK(v >= prev);
        prev = v;
    }
    prev = 0.0;
    for (double eta = 1e-5; eta < 0.5; eta *= 1.7) {
        const double v = maximize_ratio(eta, 1.0).p_multi_upper;
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("worst case dominates the honest Poisson source") {
    for (double mu : {1.0, 10.0, 100.0, 300.0}) {
        for (double eta : {1e-3, 1e-2, 0.05}) {
            if (mu * eta > 1.5) continue;
            const double honest = multiphoton_probability(bernoulli_transform(poisson_pnd(mu), eta));
            CHECK(maximize_ratio(eta, mu).p_multi_upper >= honest);
        }
    }
}

TEST_CASE("simplex_solve") {
    SUBCASE("single candidate column") {
        const auto lp = make_worst_case_lp(0.5, 1.0, 3);
        const auto sol = simplex_solve(lp);
        CHECK(sol.objective == doctest::Approx(0.125).epsilon(1e-14));
        CHECK(sol.x[2] == doctest::Approx(0.5));
        CHECK(sol.x[0] == doctest::Approx(0.5));
    }
    SUBCASE("vacuum source") {
        const auto sol = simplex_solve(make_worst_case_lp(0.3, 0.0, 20));
        CHECK(sol.objective == doctest::Approx(0.0));
        CHECK(sol.x[0] == doctest::Approx(1.0));
        for (std::size_t k = 1; k < sol.x.size(); ++k) CHECK(sol.x[k] == 0.0);
    }
    SUBCASE("agrees with maximize_ratio at the reported point") {
        const auto sol = simplex_solve(make_worst_case_lp(1e-3, 100.0, 5000));
        const auto r = maximize_ratio(1e-3, 100.0);
        CHECK(std::abs(sol.objective - r.p_multi_upper) < 1e-9);
        CHECK(sol.x[1794] == doctest::Approx(100.0 / 1794.0));
        CHECK(std::count_if(sol.x.begin(), sol.x.end(), [](double v) { return v > 0.0; }) <= 2);
    }
    SUBCASE("layout of the worst-case program") {
        const auto lp = make_worst_case_lp(0.2, 3.0, 6);
        CHECK(lp.A[0] == std::vector<double>{0, 1, 2, 3, 4, 5});
        CHECK(lp.A[1] == std::vector<double>(6, 1.0));
        CHECK(lp.c[0] == 0.0);
        CHECK(lp.c[1] == 0.0);
        CHECK(lp.c[4] == coefficient_a(4, 0.2));
        CHECK(lp.b == std::vector<double>{3.0, 1.0});
    }
    SUBCASE("infeasible and malformed instances") {
        CHECK_THROWS_AS(simplex_solve(make_worst_case_lp(0.2, 10.0, 6)), NumericalError);
        LpInstance bad{{1.0, 2.0}, {{1.0}}, {1.0}};
        CHECK_THROWS_AS(simplex_solve(bad), InvalidArgument);
    }
    SUBCASE("generic program with a redundant row") {
        // max x0 + 2 x1 s.t. x0 + x1 + x2 = 4, 2x0 + 2x1 + 2x2 = 8
        LpInstance lp{{1.0, 2.0, 0.0}, {{1.0, 1.0, 1.0}, {2.0, 2.0, 2.0}}, {4.0, 8.0}};
        const auto sol = simplex_solve(lp);
        CHECK(sol.objective == doctest::Approx(8.0));
    }
}
