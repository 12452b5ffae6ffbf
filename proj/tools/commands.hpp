#pragma once

#include "nlishape/config.hpp"

#include <cstdint>
#include <string>

namespace nlishape::cli {

/// Directory a sweep at the given span count writes into,
/// <output.directory>/sweep_<N>span.
std::string sweep_directory(const ExperimentConfig& config, int num_spans);

/// Generate one shaped symbol stream and write it as a symbol CSV.
/// blocklength < 1 picks the first configured blocklength; num_blocks < 1
/// uses shaping.blocks_per_run; out_path empty derives a name in the output
/// directory.
int cmd_shape(const ExperimentConfig& config, int blocklength, int num_blocks,
              std::uint64_t seed, std::string out_path);

/// Compute the configured metrics of a symbol CSV, emit them as JSON
/// (stdout when out_json is empty).
int cmd_metrics(const ExperimentConfig& config, const std::string& symbols_csv,
                const std::string& out_json);

/// One transmission (first blocklength, base seed); writes rx_result.json
/// plus optional symbol CSVs.
int cmd_simulate(const ExperimentConfig& config);

/// Full blocklength x seed sweep at the configured span count; writes
/// records.csv, per-run energy series and the effective config.
int cmd_sweep(const ExperimentConfig& config);

/// Forgetting-factor search over a completed sweep directory; writes
/// correlation_curve.csv and summary.json.
int cmd_optimize_lambda(const ExperimentConfig& config, std::string records_dir);

/// Emit fig2.csv/fig3.csv (primary distance) and fig4.csv (all configured
/// span counts) from completed sweep + optimize-lambda outputs.
int cmd_figures(const ExperimentConfig& config);

} // namespace nlishape::cli
