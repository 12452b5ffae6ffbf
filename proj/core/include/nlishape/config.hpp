#pragma once

#include "nlishape/analysis.hpp"
#include "nlishape/channel.hpp"
#include "nlishape/shaping.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nlishape {

struct ShapingConfig {
    std::vector<double> levels{1.0, 3.0, 5.0, 7.0};
    std::vector<double> probabilities{0.4, 0.3, 0.2, 0.1};
    std::vector<int> blocklengths;  // required
    int blocks_per_run = 1;         // used by the standalone shape command
    int seeds = 5;                  // runs per (blocklength, distance) point
    std::uint64_t base_seed = 1;

    bool operator==(const ShapingConfig&) const = default;
};

struct MetricsConfig {
    std::vector<double> lambdas{0.0, 0.9, 0.99};  // recorded per run
    double epsilon = 1e-6;                        // weight-mass truncation
    std::vector<int> edi_windows{101};
    int min_interior_samples = 1024;

    bool operator==(const MetricsConfig&) const = default;
};

struct AnalysisConfig {
    double lambda_lo = 0.6;
    double lambda_hi = 1.0;  // exclusive
    double lambda_step = 1e-4;
    std::vector<int> span_counts;  // distances for the lambda-vs-distance trend

    bool operator==(const AnalysisConfig&) const = default;
};

struct OutputConfig {
    std::string directory = "out";
    bool write_symbols = false;
    bool write_energies = true;

    bool operator==(const OutputConfig&) const = default;
};

struct RuntimeConfig {
    int workers = 0;  // 0: one per hardware thread

    bool operator==(const RuntimeConfig&) const = default;
};

struct ExperimentConfig {
    ShapingConfig shaping;
    channel::LinkConfig link;
    channel::WdmConfig wdm;
    MetricsConfig metrics;
    AnalysisConfig analysis;
    OutputConfig output;
    RuntimeConfig runtime;

    void validate() const;  // throws config_error with the offending field path
    shaping::AmplitudeAlphabet alphabet() const;
    analysis::SweepOptions sweep_options() const;
    analysis::LambdaGrid lambda_grid() const;
    /// analysis.span_counts, or the link's own span count when unset.
    std::vector<int> effective_span_counts() const;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the INI-style config text: [section] headers, key = value lines,
/// comma-separated lists, '#' comments. Unknown keys are rejected.
ExperimentConfig parse_config(std::string_view text);

/// parse_config over a file, with NLISHAPE_OUTPUT_DIR supplying the default
/// output directory. Validates before returning.
ExperimentConfig load_config(const std::string& path);

/// Applies one dotted-path assignment, e.g. "link.num_spans=4".
void apply_override(ExperimentConfig& config, std::string_view assignment);

/// Renders the effective config; parse_config(render_config(c)) == c.
std::string render_config(const ExperimentConfig& config);

/// Shortest decimal representation that parses back to exactly the same
/// double.
std::string format_double(double value);

} // namespace nlishape
