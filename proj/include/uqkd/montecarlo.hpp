#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "uqkd/confidence.hpp"
#include "uqkd/noise_bounds.hpp"
#include "uqkd/photon_stats.hpp"

namespace uqkd {

struct PoissonSource {
    double mu = 0.0;
};

/// Source PND at the input of Alice's station.
using SourceSpec = std::variant<PoissonSource, PhotonNumberDistribution>;

/// Window taken as [floor(min m'), ceil(max m')] over the run itself.
struct AutoMinMax {};
using WindowSpec = std::variant<ThresholdWindow, AutoMinMax>;

struct RunConfig {
    std::int64_t M = 1;
    std::uint64_t seed = 0;
    SourceSpec source = PoissonSource{1.0};
    PassiveSchemeParams scheme;
    NoiseModel noise = NoNoise{};
    WindowSpec window = AutoMinMax{};

    void validate() const;
};

struct RunResult {
    std::int64_t M = 0;
    std::int64_t k_prime = 0;  // readings with m1 <= m' <= m2
    double observed_min = 0.0;
    double observed_max = 0.0;
    ThresholdWindow effective_window;

    bool operator==(const RunResult&) const = default;
};

/// Trials are processed in fixed-size chunks, each with its own generator
/// seeded from (seed, chunk index); the result does not depend on `threads`.
RunResult run(const RunConfig& config, unsigned threads = 1);

struct PipelineResult {
    RunResult run;
    ConfidenceResult measured;  // Clopper-Pearson interval on P(m1 <= m' <= m2)
    UntaggedBound untagged_lower;
};

/// run -> Clopper-Pearson lower bound on the window probability -> noise
/// correction, giving a lower bound on the untagged fraction 1 - delta.
PipelineResult run_pipeline(const RunConfig& config, double alpha, unsigned threads = 1);

inline constexpr std::int64_t kChunkSize = std::int64_t{1} << 16;

}  // namespace uqkd
