#pragma once

#include "nlishape/channel.hpp"
#include "nlishape/shaping.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace nlishape::analysis {

/// One (blocklength, seed) transmission: transmitter-side metrics of the
/// central channel plus the recovered effective SNR. The transmitted energy
/// series is retained so the forgetting-factor search can re-evaluate the
/// metric at any lambda without re-running the channel.
struct ExperimentRecord {
    int blocklength = 0;
    double distance_km = 0.0;
    double launch_power_dbm = 0.0;
    std::uint64_t seed = 0;
    double effective_snr_db = 0.0;
    std::vector<std::pair<double, double>> eedi;  // (lambda, value)
    std::vector<std::pair<int, double>> edi;      // (window, value)
    double kurtosis = 0.0;
    std::vector<double> tx_energies;
};

struct CorrelationCurve {
    std::vector<double> lambda_grid;
    std::vector<double> abs_rp;
    double lambda_star = 0.0;
    double rp_star = 0.0;
};

struct LambdaGrid {
    double lo = 0.6;
    double hi = 1.0;  // exclusive
    double step = 1e-4;
};

struct BlocklengthAggregate {
    int blocklength = 0;
    double snr_mean_db = 0.0;
    double snr_ci95_db = 0.0;  // Student-t 95% half-width across seeds
    std::size_t runs = 0;
};

struct DistancePoint {
    double distance_km = 0.0;
    double lambda_star = 0.0;
    double rp_star = 0.0;
};

struct SweepOptions {
    std::vector<int> blocklengths;
    int seeds = 5;
    std::uint64_t base_seed = 1;
    std::vector<double> record_lambdas{0.0, 0.9, 0.99};
    std::vector<int> edi_windows{101};
    double epsilon = 1e-6;
    int min_interior_samples = 1024;
    int workers = 0;  // 0: one per hardware thread
    bool keep_energies = true;
    /// Called after each finished run with (record, finished, total).
    std::function<void(const ExperimentRecord&, std::size_t, std::size_t)> progress;
};

/// Sample Pearson correlation coefficient; requires length >= 3 and
/// non-constant series.
double pearson(std::span<const double> x, std::span<const double> y);

/// EEDI evaluated from a stored energy series with the configured epsilon
/// truncation, additionally capped so at least min_interior_samples
/// full-support samples remain (lambda arbitrarily close to 1 stays
/// computable on finite records).
double measured_eedi(std::span<const double> energies, double lambda, double epsilon,
                     int min_interior_samples);

/// Shaped transmit sequence for one channel of a sweep run: ceil(S/n)
/// constant-composition blocks truncated to symbols_per_channel symbols.
shaping::SymbolSequence channel_symbols(const shaping::AmplitudeAlphabet& alphabet, int n,
                                        int symbols_per_channel, std::uint64_t data_seed);

std::uint64_t channel_data_seed(std::uint64_t master_seed, int channel);
std::uint64_t link_noise_seed(std::uint64_t master_seed);

/// One full transmission at blocklength n: shape all channels, measure the
/// central channel at the transmitter, propagate, recover the effective SNR.
ExperimentRecord run_experiment(const shaping::AmplitudeAlphabet& alphabet,
                                const channel::LinkConfig& link, const channel::WdmConfig& wdm,
                                int blocklength, std::uint64_t master_seed,
                                const SweepOptions& options);

/// All (blocklength, seed) combinations; independent runs may execute
/// concurrently, the returned order is canonical (blocklength-major).
std::vector<ExperimentRecord> sweep_blocklengths(const SweepOptions& options,
                                                 const shaping::AmplitudeAlphabet& alphabet,
                                                 const channel::LinkConfig& link,
                                                 const channel::WdmConfig& wdm);

/// Exhaustive forgetting-factor search: per grid lambda, the absolute
/// Pearson correlation between per-blocklength mean EEDI and mean effective
/// SNR (dB). Ties resolve toward the smaller lambda. Never touches the
/// channel; works entirely from stored records.
CorrelationCurve optimize_lambda(std::span<const ExperimentRecord> records,
                                 const LambdaGrid& grid, double epsilon = 1e-6,
                                 int min_interior_samples = 1024);

/// lambda_star / rp_star per completed distance sweep, sorted by distance.
std::vector<DistancePoint> lambda_vs_distance(
    std::span<const std::vector<ExperimentRecord>> per_distance_records,
    const LambdaGrid& grid, double epsilon = 1e-6, int min_interior_samples = 1024);

/// Mean SNR and Student-t 95% half-width per blocklength, sorted by n.
std::vector<BlocklengthAggregate> aggregate_by_blocklength(
    std::span<const ExperimentRecord> records);

/// Per-blocklength mean of measured_eedi over each record's stored energies.
std::vector<std::pair<int, double>> mean_eedi_by_blocklength(
    std::span<const ExperimentRecord> records, double lambda, double epsilon = 1e-6,
    int min_interior_samples = 1024);

/// 95% confidence half-width of the mean (Student-t).
double ci95_halfwidth(std::span<const double> samples);

} // namespace nlishape::analysis
