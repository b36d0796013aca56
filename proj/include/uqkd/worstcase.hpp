#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace uqkd {

/// Eve's best untrusted-source PND under a mean-photon-number constraint:
/// vacuum with weight 1 - mu/k_star, Fock state k_star with weight mu/k_star.
struct WorstCaseResult {
    double p_multi_upper = 0.0;  // upper bound on P(n2 > 1)
    std::int64_t k_star = 0;
    double weight_vacuum = 1.0;  // P(n1 = 0)
    double weight_k_star = 0.0;  // P(n1 = k_star)
    // The unconstrained maximiser of a_k/k lies below mu, so k >= mu binds.
    // The two-point form is then feasible but not necessarily LP-optimal.
    bool feasibility_clamped = false;
};

/// a_k = 1 - (1-eta)^k - k eta (1-eta)^(k-1), i.e. P(Binomial(k, eta) >= 2).
double coefficient_a(std::int64_t k, double eta);

/// ceil(20 / eta).
std::int64_t default_k_cap(double eta);

/// Maximises a_k/k over max(2, ceil(mu)) <= k <= k_cap. The search is exact
/// over the whole range: a_k is increasing in k, so a_hi/lo bounds a_k/k on
/// [lo, hi] and blocks whose bound cannot beat the incumbent are discarded.
/// Ties go to the smaller k. Throws NumericalError when the maximiser sits on
/// k_cap (not bracketed) or the feasible range is empty.
WorstCaseResult maximize_ratio(double eta, double mu, std::optional<std::int64_t> k_cap = std::nullopt);

/// maximize c^T x subject to A x = b, x >= 0.
struct LpInstance {
    std::vector<double> c;
    std::vector<std::vector<double>> A;
    std::vector<double> b;
};

struct LpSolution {
    double objective = 0.0;
    std::vector<double> x;
};

/// Worst-case PND program truncated to photon numbers 0..size-1:
/// c_k = a_k (k >= 2), rows (0, 1, 2, ...) and (1, 1, 1, ...), b = (mu, 1).
LpInstance make_worst_case_lp(double eta, double mu, std::size_t size);

/// Dense two-phase simplex with Bland's rule. Throws InvalidArgument on
/// inconsistent shapes, NumericalError on infeasible or unbounded programs.
LpSolution simplex_solve(const LpInstance& instance);

}  // namespace uqkd
