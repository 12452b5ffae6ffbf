#include "commands.hpp"

#include "nlishape/analysis.hpp"
#include "nlishape/channel.hpp"
#include "nlishape/csv.hpp"
#include "nlishape/errors.hpp"
#include "nlishape/metrics.hpp"
#include "nlishape/shaping.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace nlishape::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw invalid_input_error("cannot open for writing: " + path);
    file << text;
}

void write_json(const std::string& path, const json& value) {
    write_text(path, value.dump(2) + "\n");
}

json read_json(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw invalid_input_error("cannot open for reading: " + path);
    return json::parse(file);
}

std::string energy_file_name(const analysis::ExperimentRecord& r) {
    return "energies/n" + std::to_string(r.blocklength) + "_seed" + std::to_string(r.seed) +
           ".csv";
}

/// EEDI with the sweep measurement policy, plus the interior sample count
/// it was taken over.
std::pair<double, std::size_t> measured_eedi_with_count(std::span<const double> energies,
                                                        double lambda,
                                                        const MetricsConfig& metrics_cfg) {
    if (lambda == 1.0) return {0.0, energies.size()};
    const long m = static_cast<long>(energies.size());
    const long cap = std::max(0L, (m - metrics_cfg.min_interior_samples) / 2);
    const long truncation =
        std::min(metrics::truncation_length(lambda, metrics_cfg.epsilon), cap);
    const auto series = metrics::weighted_energy_truncated(energies, lambda, truncation);
    const auto interior = series.interior();
    metrics::RunningStat stat;
    for (double v : interior) stat.push(v);
    if (stat.mean() == 0.0) throw degenerate_input_error("eedi: zero mean energy");
    return {stat.variance() / stat.mean(), interior.size()};
}

std::vector<analysis::ExperimentRecord> load_records_with_energies(const std::string& dir) {
    const std::string records_path = dir + "/records.csv";
    io::RecordsFile rf = io::read_records_csv(records_path);
    if (rf.records.empty())
        throw invalid_input_error("no records found in " + records_path);
    for (std::size_t i = 0; i < rf.records.size(); ++i) {
        if (rf.energy_files[i].empty())
            throw invalid_input_error(
                "records.csv has no stored energy series (re-run sweep with "
                "output.write_energies = true)");
        rf.records[i].tx_energies = io::read_energy_csv(dir + "/" + rf.energy_files[i]);
    }
    return std::move(rf.records);
}

double to_db(double v) { return 10.0 * std::log10(v); }

} // namespace

std::string sweep_directory(const ExperimentConfig& config, int num_spans) {
    return config.output.directory + "/sweep_" + std::to_string(num_spans) + "span";
}

int cmd_shape(const ExperimentConfig& config, int blocklength, int num_blocks,
              std::uint64_t seed, std::string out_path) {
    const int n = blocklength >= 1 ? blocklength : config.shaping.blocklengths.front();
    const int blocks = num_blocks >= 1 ? num_blocks : config.shaping.blocks_per_run;
    const shaping::SymbolSequence seq =
        shaping::generate_shaped_symbols(config.alphabet(), n, blocks, seed);

    if (out_path.empty()) {
        fs::create_directories(config.output.directory);
        out_path = config.output.directory + "/symbols_n" + std::to_string(n) + "_seed" +
                   std::to_string(seed) + ".csv";
    } else if (const fs::path parent = fs::path(out_path).parent_path(); !parent.empty()) {
        fs::create_directories(parent);
    }
    io::write_symbol_csv(out_path, seq.symbols);
    std::cout << "wrote " << seq.symbols.size() << " symbols to " << out_path << "\n";
    return 0;
}

int cmd_metrics(const ExperimentConfig& config, const std::string& symbols_csv,
                const std::string& out_json) {
    const std::vector<std::complex<double>> symbols = io::read_symbol_csv(symbols_csv);
    if (symbols.empty()) throw invalid_input_error("no symbols in " + symbols_csv);
    const std::vector<double> energies = metrics::symbol_energies(symbols);

    json out = json::array();
    for (double lambda : config.metrics.lambdas) {
        const auto [value, count] = measured_eedi_with_count(energies, lambda, config.metrics);
        out.push_back({{"metric", "eedi"}, {"lambda", lambda}, {"value", value},
                       {"n_samples", count}});
    }
    for (int window : config.metrics.edi_windows) {
        const metrics::MetricResult r = metrics::edi_from_energies(energies, window);
        out.push_back({{"metric", "edi"}, {"window", window}, {"value", r.value},
                       {"n_samples", r.sample_count}});
    }
    const metrics::MetricResult phi = metrics::kurtosis(symbols);
    out.push_back({{"metric", "kurtosis"}, {"value", phi.value}, {"n_samples", phi.sample_count}});

    if (out_json.empty()) {
        std::cout << out.dump(2) << "\n";
    } else {
        write_json(out_json, out);
        std::cout << "wrote " << out_json << "\n";
    }
    return 0;
}

int cmd_simulate(const ExperimentConfig& config) {
    const int n = config.shaping.blocklengths.front();
    const std::uint64_t seed = config.shaping.base_seed;
    const auto alphabet = config.alphabet();
    const auto& link = config.link;
    const auto& wdm = config.wdm;

    std::vector<shaping::SymbolSequence> tx(static_cast<std::size_t>(wdm.num_channels));
    for (int ch = 0; ch < wdm.num_channels; ++ch) {
        tx[static_cast<std::size_t>(ch)] = analysis::channel_symbols(
            alphabet, n, wdm.symbols_per_channel, analysis::channel_data_seed(seed, ch));
    }
    const shaping::SymbolSequence& central = tx[static_cast<std::size_t>(wdm.num_channels / 2)];

    std::vector<channel::Waveform> waveforms;
    waveforms.reserve(tx.size());
    for (const auto& seq : tx) {
        channel::Waveform w =
            channel::rrc_shape(seq.symbols, wdm.samples_per_symbol, wdm.rolloff,
                               wdm.rrc_span_symbols, wdm.symbol_rate_gbd);
        channel::scale_mean_power(w, wdm.launch_power_dbm);
        waveforms.push_back(std::move(w));
    }
    channel::Waveform field = channel::build_wdm(waveforms, wdm.channel_spacing_ghz);
    field = channel::propagate_link(std::move(field), link, analysis::link_noise_seed(seed));
    const channel::RxResult rx = channel::rx_central_channel(field, wdm, link, central);

    fs::create_directories(config.output.directory);
    const json out = {{"blocklength", n},
                      {"seed", seed},
                      {"distance_km", link.total_length_km()},
                      {"launch_power_dbm", wdm.launch_power_dbm},
                      {"effective_snr_db", rx.effective_snr_db},
                      {"scale_re", rx.scale.real()},
                      {"scale_im", rx.scale.imag()},
                      {"sampling_offset", rx.sampling_offset},
                      {"recovered_symbols", rx.recovered_symbols.size()}};
    const std::string result_path = config.output.directory + "/rx_result.json";
    write_json(result_path, out);
    if (config.output.write_symbols) {
        io::write_symbol_csv(config.output.directory + "/tx_central.csv", central.symbols);
        io::write_symbol_csv(config.output.directory + "/rx_central.csv",
                             rx.recovered_symbols);
    }
    std::cout << "effective_snr_db = " << rx.effective_snr_db << " (" << result_path << ")\n";
    return 0;
}

int cmd_sweep(const ExperimentConfig& config) {
    const std::string dir = sweep_directory(config, config.link.num_spans);
    fs::create_directories(dir);
    if (config.output.write_energies) fs::create_directories(dir + "/energies");

    analysis::SweepOptions options = config.sweep_options();
    options.progress = [](const analysis::ExperimentRecord& r, std::size_t done,
                          std::size_t total) {
        std::fprintf(stderr, "[sweep %zu/%zu] n=%d seed=%llu snr=%.3f dB\n", done, total,
                     r.blocklength, static_cast<unsigned long long>(r.seed),
                     r.effective_snr_db);
    };
    const std::vector<analysis::ExperimentRecord> records =
        analysis::sweep_blocklengths(options, config.alphabet(), config.link, config.wdm);

    std::vector<std::string> energy_files(records.size());
    if (config.output.write_energies) {
        for (std::size_t i = 0; i < records.size(); ++i) {
            energy_files[i] = energy_file_name(records[i]);
            io::write_energy_csv(dir + "/" + energy_files[i], records[i].tx_energies);
        }
    }
    io::write_records_csv(dir + "/records.csv", records, energy_files);
    write_text(dir + "/config_used.cfg", render_config(config));

    for (const auto& agg : analysis::aggregate_by_blocklength(records)) {
        std::cout << "n=" << agg.blocklength << "  mean_snr=" << agg.snr_mean_db
                  << " dB  ci95=" << agg.snr_ci95_db << " dB  runs=" << agg.runs << "\n";
    }
    std::cout << "wrote " << records.size() << " records to " << dir << "/records.csv\n";
    return 0;
}

int cmd_optimize_lambda(const ExperimentConfig& config, std::string records_dir) {
    if (records_dir.empty()) records_dir = sweep_directory(config, config.link.num_spans);
    const std::vector<analysis::ExperimentRecord> records =
        load_records_with_energies(records_dir);

    const analysis::CorrelationCurve curve =
        analysis::optimize_lambda(records, config.lambda_grid(), config.metrics.epsilon,
                                  config.metrics.min_interior_samples);
    io::write_correlation_csv(records_dir + "/correlation_curve.csv", curve);

    json per_n = json::array();
    const auto aggregates = analysis::aggregate_by_blocklength(records);
    const auto eedi_means = analysis::mean_eedi_by_blocklength(
        records, curve.lambda_star, config.metrics.epsilon,
        config.metrics.min_interior_samples);
    for (std::size_t i = 0; i < aggregates.size(); ++i) {
        per_n.push_back({{"n", aggregates[i].blocklength},
                         {"snr_mean_db", aggregates[i].snr_mean_db},
                         {"snr_ci95_db", aggregates[i].snr_ci95_db},
                         {"runs", aggregates[i].runs},
                         {"eedi_mean_at_lambda_star", eedi_means[i].second}});
    }
    const json summary = {{"distance_km", records.front().distance_km},
                          {"lambda_star", curve.lambda_star},
                          {"rp_star", curve.rp_star},
                          {"per_blocklength", per_n}};
    write_json(records_dir + "/summary.json", summary);
    std::cout << "lambda_star = " << curve.lambda_star << "  |r_p| = " << curve.rp_star
              << " (" << records_dir << "/summary.json)\n";
    return 0;
}

int cmd_figures(const ExperimentConfig& config) {
    fs::create_directories(config.output.directory);
    const std::string primary_dir = sweep_directory(config, config.link.num_spans);

    // fig2: effective SNR with confidence half-widths vs blocklength, next
    // to the metric values in dB. The EDI trace is shifted to meet the EEDI
    // trace at the largest blocklength (plot alignment only).
    {
        const auto records = load_records_with_energies(primary_dir);
        const json summary = read_json(primary_dir + "/summary.json");
        const double lambda_star = summary.at("lambda_star").get<double>();
        const auto aggregates = analysis::aggregate_by_blocklength(records);
        const auto eedi_means = analysis::mean_eedi_by_blocklength(
            records, lambda_star, config.metrics.epsilon,
            config.metrics.min_interior_samples);

        const int window = records.front().edi.empty() ? 0 : records.front().edi.front().first;
        std::vector<double> edi_means(aggregates.size(), 0.0);
        for (std::size_t i = 0; i < aggregates.size(); ++i) {
            double acc = 0.0;
            std::size_t count = 0;
            for (const auto& r : records) {
                if (r.blocklength != aggregates[i].blocklength) continue;
                for (const auto& [w, v] : r.edi)
                    if (w == window) {
                        acc += v;
                        ++count;
                    }
            }
            edi_means[i] = count > 0 ? acc / static_cast<double>(count) : 0.0;
        }
        const double shift =
            window > 0 ? to_db(eedi_means.back().second) - to_db(edi_means.back()) : 0.0;

        std::string text = "n,snr_db,ci_halfwidth_db,eedi_db,edi_db_shifted\n";
        for (std::size_t i = 0; i < aggregates.size(); ++i) {
            text += std::to_string(aggregates[i].blocklength);
            text += ',' + format_double(aggregates[i].snr_mean_db);
            text += ',' + format_double(aggregates[i].snr_ci95_db);
            text += ',' + format_double(to_db(eedi_means[i].second));
            text += ',' +
                    (window > 0 ? format_double(to_db(edi_means[i]) + shift) : std::string());
            text += '\n';
        }
        write_text(config.output.directory + "/fig2.csv", text);
    }

    // fig3: |r_p| against 1 - lambda at the primary distance.
    {
        const analysis::CorrelationCurve curve =
            io::read_correlation_csv(primary_dir + "/correlation_curve.csv");
        std::string text = "one_minus_lambda,abs_rp\n";
        for (std::size_t i = 0; i < curve.lambda_grid.size(); ++i) {
            text += format_double(1.0 - curve.lambda_grid[i]);
            text += ',' + format_double(curve.abs_rp[i]);
            text += '\n';
        }
        write_text(config.output.directory + "/fig3.csv", text);
    }

    // fig4: 1 - lambda_star across the configured distances.
    {
        struct Point {
            double distance_km;
            double lambda_star;
        };
        std::vector<Point> points;
        for (int spans : config.effective_span_counts()) {
            const std::string dir = sweep_directory(config, spans);
            const json summary = read_json(dir + "/summary.json");
            points.push_back({summary.at("distance_km").get<double>(),
                              summary.at("lambda_star").get<double>()});
        }
        std::sort(points.begin(), points.end(),
                  [](const Point& a, const Point& b) { return a.distance_km < b.distance_km; });
        std::string text = "distance_km,one_minus_lambda_star\n";
        for (const Point& p : points) {
            text += format_double(p.distance_km);
            text += ',' + format_double(1.0 - p.lambda_star);
            text += '\n';
        }
        write_text(config.output.directory + "/fig4.csv", text);
    }

    std::cout << "wrote fig2.csv, fig3.csv, fig4.csv to " << config.output.directory << "\n";
    return 0;
}

} // namespace nlishape::cli
