#include "uqkd/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "uqkd/errors.hpp"

namespace uqkd {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk) {
    return splitmix64(splitmix64(seed) ^ splitmix64(chunk + 0x632be59bd9b4e019ULL));
}

struct ChunkTally {
    std::int64_t inside = 0;
    std::int64_t negative = 0;  // readings below zero (Gaussian noise only)
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
};

// Draws the monitor photoelectron count m for one pulse.
class SignalSampler {
public:
    SignalSampler(const SourceSpec& source, double xi) : xi_(xi) {
        std::visit(Overloaded{
                       [&](const PoissonSource& s) { poisson_mean_ = s.mu * xi; },
                       [&](const PhotonNumberDistribution& p) {
                           explicit_ = std::discrete_distribution<std::int64_t>(p.probs().begin(), p.probs().end());
                       },
                   },
                   source);
    }

    template <class Rng>
    std::int64_t operator()(Rng& rng, std::poisson_distribution<std::int64_t>& poisson) {
        if (poisson_mean_ > 0.0) return poisson(rng);
        const std::int64_t n1 = explicit_(rng);
        std::binomial_distribution<std::int64_t> thin(n1, xi_);
        return thin(rng);
    }

    double poisson_mean() const { return poisson_mean_; }

private:
    double xi_;
    double poisson_mean_ = 0.0;
    std::discrete_distribution<std::int64_t> explicit_;
};

ChunkTally simulate_chunk(const RunConfig& cfg, std::uint64_t chunk, std::int64_t trials, double lo, double hi) {
    std::mt19937_64 rng(chunk_seed(cfg.seed, chunk));
    SignalSampler signal(cfg.source, cfg.scheme.xi());
    // Thinning a Poisson source by xi is Poisson(mu xi) exactly.
    std::poisson_distribution<std::int64_t> signal_poisson(signal.poisson_mean() > 0.0 ? signal.poisson_mean() : 1.0);

    ChunkTally tally;
    auto record = [&](double reading) {
        tally.min = std::min(tally.min, reading);
        tally.max = std::max(tally.max, reading);
        if (reading < 0.0) ++tally.negative;
        if (reading >= lo && reading <= hi) ++tally.inside;
    };

    std::visit(Overloaded{
                   [&](const NoNoise&) {
                       for (std::int64_t i = 0; i < trials; ++i)
                           record(static_cast<double>(signal(rng, signal_poisson)));
                   },
                   [&](const PoissonianNoise& n) {
                       std::poisson_distribution<std::int64_t> dark(n.gamma);
                       for (std::int64_t i = 0; i < trials; ++i) {
                           const std::int64_t m = signal(rng, signal_poisson);
                           record(static_cast<double>(m + dark(rng)));
                       }
                   },
                   [&](const GaussianNoise& n) {
                       std::normal_distribution<double> electronic(0.0, std::sqrt(n.sigma2));
                       for (std::int64_t i = 0; i < trials; ++i) {
                           const std::int64_t m = signal(rng, signal_poisson);
                           record(static_cast<double>(m) + electronic(rng));
                       }
                   },
               },
               cfg.noise);
    return tally;
}

}  // namespace

void RunConfig::validate() const {
    if (M < 1) throw InvalidArgument("run config: M must be >= 1");
    if (!(scheme.t_B > 0.0 && scheme.t_B < 1.0) || !(scheme.t_D > 0.0 && scheme.t_D <= 1.0))
        throw InvalidArgument("run config: t_B must lie in (0,1) and t_D in (0,1]");
    std::visit(Overloaded{
                   [](const PoissonSource& s) {
                       if (!(s.mu > 0.0) || !std::isfinite(s.mu))
                           throw InvalidArgument("run config: Poisson source mu must be positive");
                   },
                   [](const PhotonNumberDistribution&) {},
               },
               source);
    uqkd::validate(noise);
    if (const auto* w = std::get_if<ThresholdWindow>(&window)) w->validate();
}

RunResult run(const RunConfig& config, unsigned threads) {
    config.validate();
    const bool automatic = std::holds_alternative<AutoMinMax>(config.window);
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    if (!automatic) {
        const auto& w = std::get<ThresholdWindow>(config.window);
        lo = static_cast<double>(w.m1);
        hi = static_cast<double>(w.m2);
    }

    const auto chunks = static_cast<std::uint64_t>((config.M + kChunkSize - 1) / kChunkSize);
    std::vector<ChunkTally> tallies(chunks);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (std::uint64_t c = next++; c < chunks; c = next++) {
            const std::int64_t first = static_cast<std::int64_t>(c) * kChunkSize;
            const std::int64_t count = std::min(kChunkSize, config.M - first);
            tallies[c] = simulate_chunk(config, c, count, lo, hi);
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    }

    ChunkTally total;
    for (const auto& t : tallies) {
        total.inside += t.inside;
        total.negative += t.negative;
        total.min = std::min(total.min, t.min);
        total.max = std::max(total.max, t.max);
    }

    RunResult out;
    out.M = config.M;
    out.observed_min = total.min;
    out.observed_max = total.max;
    if (automatic) {
        // Thresholds are non-negative integers; readings pushed below zero by
        // Gaussian noise fall outside the window.
        out.effective_window.m1 = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(total.min)));
        out.effective_window.m2 = std::max(out.effective_window.m1 + 1, static_cast<std::int64_t>(std::ceil(total.max)));
        out.k_prime = config.M - (total.min < 0.0 ? total.negative : 0);
    } else {
        out.effective_window = std::get<ThresholdWindow>(config.window);
        out.k_prime = total.inside;
    }
    return out;
}

PipelineResult run_pipeline(const RunConfig& config, double alpha, unsigned threads) {
    PipelineResult out;
    out.run = run(config, threads);
    out.measured = clopper_pearson(out.run.k_prime, out.run.M, alpha);
    out.untagged_lower = untagged_lower_bound(out.measured.lower, out.run.effective_window, config.noise);
    return out;
}

}  // namespace uqkd
