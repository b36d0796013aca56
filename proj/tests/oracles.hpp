#pragma once

// Reference computations used only by the tests. Each one follows the
// textbook definition by the most direct route available and shares no code
// with the library.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

// Pascal's triangle, exact in double for n <= 50.
inline std::vector<std::vector<double>> pascal(std::size_t n_max) {
    std::vector<std::vector<double>> c(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
        c[n].assign(n + 1, 1.0);
        for (std::size_t k = 1; k < n; ++k) c[n][k] = c[n - 1][k - 1] + c[n - 1][k];
    }
    return c;
}

// out[m] = sum_n p[n] C(n,m) t^m (1-t)^(n-m) by explicit double sum.
inline std::vector<double> thin(const std::vector<double>& p, double t) {
    const auto c = pascal(p.size() - 1);
    std::vector<double> out(p.size(), 0.0);
    for (std::size_t n = 0; n < p.size(); ++n)
        for (std::size_t m = 0; m <= n; ++m)
            out[m] += p[n] * c[n][m] * std::pow(t, static_cast<double>(m)) *
                      std::pow(1.0 - t, static_cast<double>(n - m));
    return out;
}

// Poisson pmf by forward recurrence from e^-mu (fine for small mu).
inline std::vector<double> poisson(double mu, std::size_t n_max) {
    std::vector<double> p(n_max + 1);
    p[0] = std::exp(-mu);
    for (std::size_t n = 1; n <= n_max; ++n) p[n] = p[n - 1] * mu / static_cast<double>(n);
    return p;
}

// P(X >= x) for X ~ Binomial(M, p) by direct summation (small M only).
inline double binom_at_least(int x, int M, double p) {
    const auto c = pascal(static_cast<std::size_t>(M));
    double s = 0.0;
    for (int j = x; j <= M; ++j) s += c[M][j] * std::pow(p, j) * std::pow(1.0 - p, M - j);
    return s;
}

inline double binom_at_most(int x, int M, double p) {
    const auto c = pascal(static_cast<std::size_t>(M));
    double s = 0.0;
    for (int j = 0; j <= x; ++j) s += c[M][j] * std::pow(p, j) * std::pow(1.0 - p, M - j);
    return s;
}

// Root of an increasing function on [0,1] by plain bisection.
inline double bisect_increasing(const std::function<double(double)>& f, double target) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 50) {
    auto rule = [&](double l, double r) { return (r - l) / 6.0 * (f(l) + 4.0 * f(0.5 * (l + r)) + f(r)); };
    std::function<double(double, double, double, double, int)> rec = [&](double l, double r, double whole, double eps,
                                                                          int d) {
        const double m = 0.5 * (l + r);
        const double left = rule(l, m), right = rule(m, r);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps) return left + right + (left + right - whole) / 15.0;
        return rec(l, m, left, eps / 2.0, d - 1) + rec(m, r, right, eps / 2.0, d - 1);
    };
    return rec(a, b, rule(a, b), tol, depth);
}

inline double gaussian_density(double x, double sigma2) {
    return std::exp(-x * x / (2.0 * sigma2)) / std::sqrt(2.0 * M_PI * sigma2);
}

}  // namespace oracle
