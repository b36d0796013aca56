#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uqkd/keyrate.hpp"
#include "uqkd/montecarlo.hpp"
#include "uqkd/noise_bounds.hpp"
#include "uqkd/photon_stats.hpp"

namespace uqkd::cli {

enum class Mode { ApnBb84, PnaBb84, TrustedBb84, PnaDecoy, TrustedDecoy, McPipeline };

const char* to_string(Mode m);
std::optional<Mode> parse_mode(const std::string& s);

struct Sweep {
    double L_start = 0.0;
    double L_end = 0.0;
    double L_step = 1.0;

    /// Grid points from L_start to L_end inclusive. Points are computed as
    /// L_start + i * L_step so the grid does not drift.
    std::vector<double> points() const;
};

/// Simulated power-meter records for the APN monitor. Each record averages
/// `pulses_per_record` monitor readings.
struct ApnMonitor {
    std::int64_t records = 0;
    double pulses_per_record = 0.0;
};

/// Where the untagged fraction 1 - delta comes from.
enum class UntaggedSource {
    Exact,       // Poisson window mass of the source, no fluctuation, no noise
    MonteCarlo,  // simulated two-threshold run, one value per noise model
    Fixed,
};

struct Scenario {
    std::string name;
    std::string description;
    Mode mode = Mode::ApnBb84;

    PassiveSchemeParams scheme;
    bool channel_matched = false;  // lambda set per L so that mu * eta = eta_B * eta_f

    ChannelParams channel;
    double f_ec = 1.0;
    Sweep sweep;

    DecoySettings decoy;
    bool has_decoy = false;

    std::optional<double> mu_upper;
    std::optional<ApnMonitor> monitor;

    WindowSpec window = AutoMinMax{};
    bool has_window = false;
    std::vector<NoiseModel> noise{NoNoise{}};
    UntaggedSource untagged = UntaggedSource::Exact;
    double untagged_value = 1.0;

    std::int64_t M = 100000;
    std::uint64_t seed = 1;
    double alpha = 0.05;
    std::optional<std::string> output;
};

struct FieldError {
    std::string field;
    std::string message;
};

class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<FieldError> errors);
    const std::vector<FieldError>& errors() const { return errors_; }

private:
    std::vector<FieldError> errors_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses YAML text into a scenario and runs every schema and physics check,
/// collecting all problems before throwing ScenarioError.
Scenario parse_scenario(const std::string& text, const std::string& name = "scenario");
Scenario load_scenario(const std::filesystem::path& path);

/// Physics checks on an already-built scenario; empty when valid.
std::vector<FieldError> check_scenario(const Scenario& s);

/// The scheme in force at distance L, with lambda resolved when channel-matched.
PassiveSchemeParams scheme_at(const Scenario& s, double L);

/// Serialize the resolved configuration back to YAML.
std::string to_yaml(const Scenario& s);

}  // namespace uqkd::cli
