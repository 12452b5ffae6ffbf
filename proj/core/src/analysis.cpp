#include "nlishape/analysis.hpp"

#include "nlishape/errors.hpp"
#include "nlishape/metrics.hpp"
#include "nlishape/rng.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

namespace nlishape::analysis {

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw invalid_input_error("pearson: length mismatch");
    if (x.size() < 3) throw invalid_input_error("pearson: need at least 3 points");

    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw degenerate_input_error("pearson: correlation undefined for a constant series");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double measured_eedi(std::span<const double> energies, double lambda, double epsilon,
                     int min_interior_samples) {
    if (lambda == 1.0) return 0.0;
    if (min_interior_samples < 2)
        throw invalid_input_error("measured_eedi: min_interior_samples must be >= 2");
    const long m = static_cast<long>(energies.size());
    const long cap = std::max(0L, (m - min_interior_samples) / 2);
    const long truncation = std::min(metrics::truncation_length(lambda, epsilon), cap);
    const auto series = metrics::weighted_energy_truncated(energies, lambda, truncation);
    const auto interior = series.interior();
    if (interior.size() < 2)
        throw insufficient_length_error("measured_eedi: interior range too short");
    metrics::RunningStat stat;
    for (double v : interior) stat.push(v);
    if (stat.mean() == 0.0) throw degenerate_input_error("measured_eedi: zero mean energy");
    return stat.variance() / stat.mean();
}

shaping::SymbolSequence channel_symbols(const shaping::AmplitudeAlphabet& alphabet, int n,
                                        int symbols_per_channel, std::uint64_t data_seed) {
    if (symbols_per_channel < 1)
        throw invalid_input_error("channel_symbols: symbols_per_channel must be >= 1");
    const int num_blocks = (symbols_per_channel + n - 1) / n;
    shaping::SymbolSequence seq =
        shaping::generate_shaped_symbols(alphabet, n, num_blocks, data_seed);
    seq.symbols.resize(static_cast<std::size_t>(symbols_per_channel));
    return seq;
}

std::uint64_t channel_data_seed(std::uint64_t master_seed, int channel) {
    return Rng(master_seed).split(100 + static_cast<std::uint64_t>(channel)).seed();
}

std::uint64_t link_noise_seed(std::uint64_t master_seed) {
    return Rng(master_seed).split(0).seed();
}

ExperimentRecord run_experiment(const shaping::AmplitudeAlphabet& alphabet,
                                const channel::LinkConfig& link, const channel::WdmConfig& wdm,
                                int blocklength, std::uint64_t master_seed,
                                const SweepOptions& options) {
    link.validate();
    wdm.validate();

    std::vector<shaping::SymbolSequence> tx(static_cast<std::size_t>(wdm.num_channels));
    for (int ch = 0; ch < wdm.num_channels; ++ch) {
        tx[static_cast<std::size_t>(ch)] = channel_symbols(
            alphabet, blocklength, wdm.symbols_per_channel, channel_data_seed(master_seed, ch));
    }
    const shaping::SymbolSequence& central = tx[static_cast<std::size_t>(wdm.num_channels / 2)];

    ExperimentRecord record;
    record.blocklength = blocklength;
    record.distance_km = link.total_length_km();
    record.launch_power_dbm = wdm.launch_power_dbm;
    record.seed = master_seed;

    // Transmitter-side metrics of the central channel.
    std::vector<double> energies = metrics::symbol_energies(central.symbols);
    for (double lambda : options.record_lambdas) {
        record.eedi.emplace_back(
            lambda, measured_eedi(energies, lambda, options.epsilon, options.min_interior_samples));
    }
    for (int window : options.edi_windows) {
        record.edi.emplace_back(window, metrics::edi_from_energies(energies, window).value);
    }
    record.kurtosis = metrics::kurtosis(central.symbols).value;

    // Propagation and effective SNR of the central channel.
    std::vector<channel::Waveform> waveforms;
    waveforms.reserve(tx.size());
    for (const auto& seq : tx) {
        channel::Waveform w = channel::rrc_shape(seq.symbols, wdm.samples_per_symbol,
                                                 wdm.rolloff, wdm.rrc_span_symbols,
                                                 wdm.symbol_rate_gbd);
        channel::scale_mean_power(w, wdm.launch_power_dbm);
        waveforms.push_back(std::move(w));
    }
    channel::Waveform field = channel::build_wdm(waveforms, wdm.channel_spacing_ghz);
    field = channel::propagate_link(std::move(field), link, link_noise_seed(master_seed));
    const channel::RxResult rx = channel::rx_central_channel(field, wdm, link, central);
    record.effective_snr_db = rx.effective_snr_db;

    if (options.keep_energies) record.tx_energies = std::move(energies);
    return record;
}

namespace {

void run_jobs(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    unsigned int pool = workers > 0 ? static_cast<unsigned int>(workers)
                                    : std::max(1u, std::thread::hardware_concurrency());
    pool = static_cast<unsigned int>(std::min<std::size_t>(pool, count));
    if (pool <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (unsigned int t = 0; t < pool; ++t) {
        threads.emplace_back([&]() {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : threads) t.join();
}

} // namespace

std::vector<ExperimentRecord> sweep_blocklengths(const SweepOptions& options,
                                                 const shaping::AmplitudeAlphabet& alphabet,
                                                 const channel::LinkConfig& link,
                                                 const channel::WdmConfig& wdm) {
    if (options.blocklengths.empty())
        throw invalid_input_error("sweep_blocklengths: no blocklengths given");
    if (options.seeds < 1) throw invalid_input_error("sweep_blocklengths: seeds must be >= 1");

    struct Job {
        int blocklength;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (int n : options.blocklengths) {
        for (int s = 0; s < options.seeds; ++s) {
            // The seed set is shared across blocklengths, so noise
            // realizations are common random numbers when comparing n.
            jobs.push_back({n, options.base_seed + static_cast<std::uint64_t>(s)});
        }
    }

    std::vector<ExperimentRecord> records(jobs.size());
    std::mutex progress_mutex;
    std::atomic<std::size_t> finished{0};
    run_jobs(jobs.size(), options.workers, [&](std::size_t i) {
        records[i] =
            run_experiment(alphabet, link, wdm, jobs[i].blocklength, jobs[i].seed, options);
        const std::size_t done = finished.fetch_add(1) + 1;
        if (options.progress) {
            std::lock_guard<std::mutex> lock(progress_mutex);
            options.progress(records[i], done, jobs.size());
        }
    });
    return records;
}

namespace {

std::map<int, std::vector<const ExperimentRecord*>> group_by_blocklength(
    std::span<const ExperimentRecord> records) {
    std::map<int, std::vector<const ExperimentRecord*>> groups;
    for (const auto& r : records) groups[r.blocklength].push_back(&r);
    return groups;
}

} // namespace

CorrelationCurve optimize_lambda(std::span<const ExperimentRecord> records,
                                 const LambdaGrid& grid, double epsilon,
                                 int min_interior_samples) {
    if (!(grid.lo >= 0.0) || !(grid.hi <= 1.0) || !(grid.lo < grid.hi) || !(grid.step > 0.0))
        throw invalid_input_error("optimize_lambda: invalid grid");
    const auto groups = group_by_blocklength(records);
    if (groups.size() < 3)
        throw invalid_input_error("optimize_lambda: need records for at least 3 blocklengths");
    for (const auto& [n, group] : groups) {
        for (const ExperimentRecord* r : group) {
            if (r->tx_energies.empty())
                throw invalid_input_error(
                    "optimize_lambda: records are missing their stored energy series");
        }
    }

    std::vector<double> mean_snr;
    mean_snr.reserve(groups.size());
    for (const auto& [n, group] : groups) {
        double acc = 0.0;
        for (const ExperimentRecord* r : group) acc += r->effective_snr_db;
        mean_snr.push_back(acc / static_cast<double>(group.size()));
    }

    CorrelationCurve curve;
    const auto count = static_cast<std::size_t>(
        std::ceil((grid.hi - grid.lo) / grid.step - 1e-12));
    curve.lambda_grid.reserve(count);
    curve.abs_rp.reserve(count);

    std::vector<double> mean_eedi(groups.size());
    double best = -1.0;
    for (std::size_t j = 0; j < count; ++j) {
        const double lambda = grid.lo + static_cast<double>(j) * grid.step;
        if (lambda >= grid.hi) break;
        std::size_t gi = 0;
        for (const auto& [n, group] : groups) {
            double acc = 0.0;
            for (const ExperimentRecord* r : group)
                acc += measured_eedi(r->tx_energies, lambda, epsilon, min_interior_samples);
            mean_eedi[gi++] = acc / static_cast<double>(group.size());
        }
        const double rp = std::abs(pearson(mean_eedi, mean_snr));
        curve.lambda_grid.push_back(lambda);
        curve.abs_rp.push_back(rp);
        if (rp > best) {  // strict: ties keep the smaller lambda
            best = rp;
            curve.lambda_star = lambda;
            curve.rp_star = rp;
        }
    }
    return curve;
}

std::vector<DistancePoint> lambda_vs_distance(
    std::span<const std::vector<ExperimentRecord>> per_distance_records,
    const LambdaGrid& grid, double epsilon, int min_interior_samples) {
    std::vector<DistancePoint> points;
    points.reserve(per_distance_records.size());
    for (const auto& records : per_distance_records) {
        if (records.empty())
            throw invalid_input_error("lambda_vs_distance: empty record set");
        const CorrelationCurve curve =
            optimize_lambda(records, grid, epsilon, min_interior_samples);
        points.push_back({records.front().distance_km, curve.lambda_star, curve.rp_star});
    }
    std::sort(points.begin(), points.end(),
              [](const DistancePoint& a, const DistancePoint& b) {
                  return a.distance_km < b.distance_km;
              });
    return points;
}

std::vector<BlocklengthAggregate> aggregate_by_blocklength(
    std::span<const ExperimentRecord> records) {
    std::vector<BlocklengthAggregate> out;
    for (const auto& [n, group] : group_by_blocklength(records)) {
        std::vector<double> snrs;
        snrs.reserve(group.size());
        for (const ExperimentRecord* r : group) snrs.push_back(r->effective_snr_db);
        BlocklengthAggregate agg;
        agg.blocklength = n;
        agg.runs = snrs.size();
        double acc = 0.0;
        for (double v : snrs) acc += v;
        agg.snr_mean_db = acc / static_cast<double>(snrs.size());
        agg.snr_ci95_db = ci95_halfwidth(snrs);
        out.push_back(agg);
    }
    return out;
}

std::vector<std::pair<int, double>> mean_eedi_by_blocklength(
    std::span<const ExperimentRecord> records, double lambda, double epsilon,
    int min_interior_samples) {
    std::vector<std::pair<int, double>> out;
    for (const auto& [n, group] : group_by_blocklength(records)) {
        double acc = 0.0;
        for (const ExperimentRecord* r : group)
            acc += measured_eedi(r->tx_energies, lambda, epsilon, min_interior_samples);
        out.emplace_back(n, acc / static_cast<double>(group.size()));
    }
    return out;
}

double ci95_halfwidth(std::span<const double> samples) {
    if (samples.size() < 2) return 0.0;
    metrics::RunningStat stat;
    for (double v : samples) stat.push(v);
    const double sd = std::sqrt(stat.variance());
    if (sd == 0.0) return 0.0;
    boost::math::students_t_distribution<double> dist(
        static_cast<double>(samples.size() - 1));
    const double t = boost::math::quantile(dist, 0.975);
    return t * sd / std::sqrt(static_cast<double>(samples.size()));
}

} // namespace nlishape::analysis
