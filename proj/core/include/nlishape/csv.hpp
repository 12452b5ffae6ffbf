#pragma once

#include "nlishape/analysis.hpp"

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace nlishape::io {

/// Symbol stream as (index, re, im) rows. All numeric CSV output uses '.'
/// decimals and shortest exact round-trip formatting, so identical data
/// serializes to identical bytes.
void write_symbol_csv(const std::string& path,
                      std::span<const std::complex<double>> symbols);
std::vector<std::complex<double>> read_symbol_csv(const std::string& path);

/// One energy value per row.
void write_energy_csv(const std::string& path, std::span<const double> energies);
std::vector<double> read_energy_csv(const std::string& path);

/// records.csv: one row per run; stored energy series go to sidecar files
/// referenced by the energy_file column (may be empty).
void write_records_csv(const std::string& path,
                       std::span<const analysis::ExperimentRecord> records,
                       std::span<const std::string> energy_files);

struct RecordsFile {
    std::vector<analysis::ExperimentRecord> records;  // tx_energies not populated
    std::vector<std::string> energy_files;
};
RecordsFile read_records_csv(const std::string& path);

/// records.csv data rows only (no header), e.g. for byte-identity checks.
std::string records_csv_rows(std::span<const analysis::ExperimentRecord> records,
                             std::span<const std::string> energy_files);

/// correlation_curve.csv: (lambda, abs_rp) rows.
void write_correlation_csv(const std::string& path, const analysis::CorrelationCurve& curve);
analysis::CorrelationCurve read_correlation_csv(const std::string& path);

} // namespace nlishape::io
