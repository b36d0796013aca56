#include "uqkd/worstcase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "uqkd/errors.hpp"

namespace uqkd {

double coefficient_a(std::int64_t k, double eta) {
    if (k < 2) throw InvalidArgument("coefficient_a: k must be >= 2");
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("coefficient_a: eta must lie in (0,1)");
    const double kd = static_cast<double>(k);
    if (kd * eta < 0.5) {
        // Closed form cancels catastrophically here; sum the binomial upper
        // tail from j = 2 instead. Terms shrink at least geometrically.
        double term = std::exp(std::log(kd * (kd - 1.0) / 2.0) + 2.0 * std::log(eta) +
                               (kd - 2.0) * std::log1p(-eta));
        double sum = term;
        const double odds = eta / (1.0 - eta);
        for (std::int64_t j = 2; j < k; ++j) {
            term *= (kd - static_cast<double>(j)) / static_cast<double>(j + 1) * odds;
            sum += term;
            if (term < sum * 1e-18) break;
        }
        return sum;
    }
    const double km1 = kd - 1.0;
    return -std::expm1(km1 * std::log1p(-eta) + std::log1p(km1 * eta));
}

std::int64_t default_k_cap(double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("default_k_cap: eta must lie in (0,1)");
    return static_cast<std::int64_t>(std::ceil(20.0 / eta));
}

namespace {

struct Best {
    std::int64_t k = 0;
    double ratio = -1.0;

    void offer(std::int64_t cand, double value) {
        if (value > ratio || (value == ratio && cand < k)) {
            k = cand;
            ratio = value;
        }
    }
};

// Relative slack on block bounds to absorb rounding in coefficient_a.
constexpr double kBoundSlack = 1e-13;
constexpr std::int64_t kLeafSize = 64;

Best maximize_over(double eta, std::int64_t lo, std::int64_t hi) {
    auto ratio = [eta](std::int64_t k) { return coefficient_a(k, eta) / static_cast<double>(k); };
    Best best;
    // Seed the incumbent on a geometric grid so pruning bites early.
    const double span = static_cast<double>(hi) / static_cast<double>(lo);
    std::vector<std::int64_t> seeds{lo};
    for (int i = 1; i < 256; ++i) {
        const auto k = static_cast<std::int64_t>(
            std::llround(static_cast<double>(lo) * std::pow(span, i / 256.0)));
        if (k > seeds.back() && k < hi) seeds.push_back(k);
    }
    seeds.push_back(hi);
    std::size_t at = 0;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const double v = ratio(seeds[i]);
        if (v > best.ratio) at = i;
        best.offer(seeds[i], v);
    }
    // Polish the incumbent between the neighbouring seeds. Depth-first search
    // from a coarse incumbent would otherwise creep up the flank of the peak
    // one leaf at a time. The search below certifies the result either way.
    std::int64_t a = seeds[at == 0 ? 0 : at - 1];
    std::int64_t b = seeds[std::min(at + 1, seeds.size() - 1)];
    while (b - a > 2) {
        const std::int64_t m1 = a + (b - a) / 3;
        const std::int64_t m2 = b - (b - a) / 3;
        if (ratio(m1) < ratio(m2))
            a = m1;
        else
            b = m2;
    }
    for (std::int64_t k = a; k <= b; ++k) best.offer(k, ratio(k));

    std::vector<std::pair<std::int64_t, std::int64_t>> stack{{lo, hi}};
    while (!stack.empty()) {
        const auto [a, b] = stack.back();
        stack.pop_back();
        const double bound = coefficient_a(b, eta) / static_cast<double>(a) * (1.0 + kBoundSlack);
        if (bound < best.ratio) continue;
        if (b - a < kLeafSize) {
            for (std::int64_t k = a; k <= b; ++k) best.offer(k, ratio(k));
            continue;
        }
        const std::int64_t mid = a + (b - a) / 2;
        stack.emplace_back(mid + 1, b);
        stack.emplace_back(a, mid);
    }
    return best;
}

}  // namespace

WorstCaseResult maximize_ratio(double eta, double mu, std::optional<std::int64_t> k_cap) {
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("maximize_ratio: eta must lie in (0,1)");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("maximize_ratio: mu must be positive");
    const std::int64_t cap = k_cap.value_or(default_k_cap(eta));
    const std::int64_t k_lo = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(mu)));
    if (k_lo >= cap)
        throw NumericalError("maximize_ratio: k_cap=" + std::to_string(cap) +
                             " leaves no room above the feasibility floor k >= " + std::to_string(k_lo));

    const Best best = maximize_over(eta, k_lo, cap);
    if (best.k == cap)
        throw NumericalError("maximize_ratio: maximum of a_k/k not bracketed below k_cap=" +
                             std::to_string(cap));

    WorstCaseResult out;
    out.k_star = best.k;
    out.p_multi_upper = best.ratio * mu;
    out.weight_k_star = mu / static_cast<double>(best.k);
    out.weight_vacuum = 1.0 - out.weight_k_star;
    if (k_lo > 2) out.feasibility_clamped = maximize_over(eta, 2, k_lo - 1).ratio > best.ratio;
    return out;
}

LpInstance make_worst_case_lp(double eta, double mu, std::size_t size) {
    if (size < 3) throw InvalidArgument("make_worst_case_lp: need at least photon numbers 0..2");
    LpInstance lp;
    lp.c.assign(size, 0.0);
    lp.A.assign(2, std::vector<double>(size, 1.0));
    for (std::size_t k = 0; k < size; ++k) {
        lp.A[0][k] = static_cast<double>(k);
        if (k >= 2) lp.c[k] = coefficient_a(static_cast<std::int64_t>(k), eta);
    }
    lp.b = {mu, 1.0};
    return lp;
}

namespace {

constexpr double kPivotTol = 1e-10;

// Tableau over n structural + m artificial columns; rhs kept separately.
class Tableau {
public:
    explicit Tableau(const LpInstance& lp) : m_(lp.A.size()), n_(lp.c.size()) {
        rows_.assign(m_, std::vector<double>(n_ + m_, 0.0));
        rhs_.resize(m_);
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            const double sign = lp.b[i] < 0.0 ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n_; ++j) rows_[i][j] = sign * lp.A[i][j];
            rows_[i][n_ + i] = 1.0;
            rhs_[i] = sign * lp.b[i];
            basis_[i] = n_ + i;
        }
        allowed_.assign(n_ + m_, true);
    }

    // Maximises cost^T x from the current basis. Returns false if unbounded.
    bool optimize(const std::vector<double>& cost) {
        while (true) {
            std::vector<double> reduced(cost);
            for (std::size_t i = 0; i < m_; ++i) {
                const double cb = cost[basis_[i]];
                if (cb == 0.0) continue;
                for (std::size_t j = 0; j < reduced.size(); ++j) reduced[j] -= cb * rows_[i][j];
            }
            // Bland: lowest-index improving column enters.
            std::size_t enter = reduced.size();
            for (std::size_t j = 0; j < reduced.size(); ++j) {
                if (allowed_[j] && !is_basic(j) && reduced[j] > kPivotTol) {
                    enter = j;
                    break;
                }
            }
            if (enter == reduced.size()) return true;

            std::size_t leave = m_;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                if (rows_[i][enter] <= kPivotTol) continue;
                const double r = rhs_[i] / rows_[i][enter];
                // Bland tie-break: lowest basic index leaves.
                if (r < best_ratio - 1e-15 ||
                    (std::abs(r - best_ratio) <= 1e-15 && leave < m_ && basis_[i] < basis_[leave])) {
                    best_ratio = r;
                    leave = i;
                }
            }
            if (leave == m_) return false;
            pivot(leave, enter);
        }
    }

    void pivot(std::size_t r, std::size_t c) {
        const double p = rows_[r][c];
        for (auto& v : rows_[r]) v /= p;
        rhs_[r] /= p;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = rows_[i][c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < rows_[i].size(); ++j) rows_[i][j] -= f * rows_[r][j];
            rhs_[i] -= f * rhs_[r];
        }
        basis_[r] = c;
    }

    // Pivots remaining zero-level artificials out of the basis, dropping rows
    // that turn out to be redundant.
    void expel_artificials() {
        for (std::size_t i = 0; i < m_;) {
            if (basis_[i] < n_) {
                ++i;
                continue;
            }
            std::size_t col = n_;
            for (std::size_t j = 0; j < n_; ++j) {
                if (!is_basic(j) && std::abs(rows_[i][j]) > kPivotTol) {
                    col = j;
                    break;
                }
            }
            if (col < n_) {
                pivot(i, col);
                ++i;
            } else {
                rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i));
                rhs_.erase(rhs_.begin() + static_cast<std::ptrdiff_t>(i));
                basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
                --m_;
            }
        }
        for (std::size_t j = n_; j < allowed_.size(); ++j) allowed_[j] = false;
    }

    double artificial_level() const {
        double s = 0.0;
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] >= n_) s += rhs_[i];
        return s;
    }

    std::vector<double> solution() const {
        std::vector<double> x(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_) x[basis_[i]] = std::max(0.0, rhs_[i]);
        return x;
    }

private:
    bool is_basic(std::size_t j) const {
        return std::find(basis_.begin(), basis_.end(), j) != basis_.end();
    }

    std::size_t m_;
    std::size_t n_;
    std::vector<std::vector<double>> rows_;
    std::vector<double> rhs_;
    std::vector<std::size_t> basis_;
    std::vector<bool> allowed_;
};

}  // namespace

LpSolution simplex_solve(const LpInstance& instance) {
    const std::size_t n = instance.c.size();
    if (n == 0 || instance.A.empty() || instance.A.size() != instance.b.size())
        throw InvalidArgument("simplex_solve: inconsistent instance shape");
    for (const auto& row : instance.A)
        if (row.size() != n) throw InvalidArgument("simplex_solve: constraint row length mismatch");

    const std::size_t m = instance.A.size();
    Tableau tab(instance);

    std::vector<double> phase1(n + m, 0.0);
    for (std::size_t j = n; j < n + m; ++j) phase1[j] = -1.0;
    tab.optimize(phase1);
    if (tab.artificial_level() > 1e-9) throw NumericalError("simplex_solve: infeasible instance");
    tab.expel_artificials();

    std::vector<double> phase2(n + m, 0.0);
    std::copy(instance.c.begin(), instance.c.end(), phase2.begin());
    if (!tab.optimize(phase2)) throw NumericalError("simplex_solve: unbounded objective");

    LpSolution sol;
    sol.x = tab.solution();
    for (std::size_t j = 0; j < n; ++j) sol.objective += instance.c[j] * sol.x[j];
    return sol;
}

}  // namespace uqkd
