#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "uqkd/cli/scenario.hpp"

namespace uqkd::cli {

inline constexpr const char* kVersion = "0.1.0";

struct Row {
    double L = 0.0;
    double rate = 0.0;
    double Q = 0.0;
    double E = 0.0;
    double delta_bar = 0.0;
    std::string note;
};

/// One rate curve (one noise model, or the single curve of a noise-free mode)
/// or, in mc-pipeline mode, one simulated run.
struct Curve {
    std::string label;
    std::vector<Row> rows;
    std::optional<double> untagged_lower;
    std::optional<PipelineResult> pipeline;
    std::optional<double> true_window_mass;
    std::optional<double> snr;  // <m>/gamma or <m>/sigma^2
    std::optional<double> max_secure_km;
    bool degenerate = false;
};

struct Report {
    std::vector<Curve> curves;
    std::vector<std::string> notes;
};

Report execute(const Scenario& s, unsigned threads = 1);

/// Comment header, delimited table, and trailing summary lines.
void write_report(std::ostream& os, const Scenario& s, const Report& r);

/// Human-readable summary (max secure distance and SNR per curve).
void write_summary(std::ostream& os, const Scenario& s, const Report& r);

}  // namespace uqkd::cli
