#include "nlishape/csv.hpp"

#include "nlishape/config.hpp"
#include "nlishape/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nlishape::io {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream file(path, std::ios::binary);  // LF line endings everywhere
    if (!file) throw invalid_input_error("cannot open for writing: " + path);
    return file;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw invalid_input_error("cannot open for reading: " + path);
    return file;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double to_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw invalid_input_error("csv: expected a number, got '" + s + "'");
    return v;
}

} // namespace

void write_symbol_csv(const std::string& path,
                      std::span<const std::complex<double>> symbols) {
    auto file = open_out(path);
    file << "index,re,im\n";
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        file << i << ',' << format_double(symbols[i].real()) << ','
             << format_double(symbols[i].imag()) << '\n';
    }
}

std::vector<std::complex<double>> read_symbol_csv(const std::string& path) {
    auto file = open_in(path);
    std::string line;
    if (!std::getline(file, line) || split_row(line).size() < 3)
        throw invalid_input_error("symbol csv: missing index,re,im header: " + path);
    std::vector<std::complex<double>> symbols;
    while (std::getline(file, line)) {
        if (line.empty()) continue;
        const auto cells = split_row(line);
        if (cells.size() < 3) throw invalid_input_error("symbol csv: short row in " + path);
        symbols.emplace_back(to_double(cells[1]), to_double(cells[2]));
    }
    return symbols;
}

void write_energy_csv(const std::string& path, std::span<const double> energies) {
    auto file = open_out(path);
    file << "energy\n";
    for (double e : energies) file << format_double(e) << '\n';
}

std::vector<double> read_energy_csv(const std::string& path) {
    auto file = open_in(path);
    std::string line;
    if (!std::getline(file, line))
        throw invalid_input_error("energy csv: empty file: " + path);
    std::vector<double> energies;
    while (std::getline(file, line)) {
        if (line.empty()) continue;
        energies.push_back(to_double(line));
    }
    return energies;
}

namespace {

std::string records_header(const analysis::ExperimentRecord& first) {
    std::string header = "blocklength,distance_km,launch_power_dbm,seed,effective_snr_db,kurtosis";
    for (const auto& [lambda, value] : first.eedi)
        header += ",eedi_lambda_" + format_double(lambda);
    for (const auto& [window, value] : first.edi)
        header += ",edi_w" + std::to_string(window);
    header += ",energy_file";
    return header;
}

void append_record_row(std::string& out, const analysis::ExperimentRecord& r,
                       const std::string& energy_file) {
    out += std::to_string(r.blocklength);
    out += ',' + format_double(r.distance_km);
    out += ',' + format_double(r.launch_power_dbm);
    out += ',' + std::to_string(r.seed);
    out += ',' + format_double(r.effective_snr_db);
    out += ',' + format_double(r.kurtosis);
    for (const auto& [lambda, value] : r.eedi) out += ',' + format_double(value);
    for (const auto& [window, value] : r.edi) out += ',' + format_double(value);
    out += ',' + energy_file;
    out += '\n';
}

} // namespace

std::string records_csv_rows(std::span<const analysis::ExperimentRecord> records,
                             std::span<const std::string> energy_files) {
    std::string out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const std::string file = i < energy_files.size() ? energy_files[i] : std::string{};
        append_record_row(out, records[i], file);
    }
    return out;
}

void write_records_csv(const std::string& path,
                       std::span<const analysis::ExperimentRecord> records,
                       std::span<const std::string> energy_files) {
    if (records.empty()) throw invalid_input_error("write_records_csv: no records");
    auto file = open_out(path);
    file << records_header(records.front()) << '\n';
    file << records_csv_rows(records, energy_files);
}

RecordsFile read_records_csv(const std::string& path) {
    auto file = open_in(path);
    std::string line;
    if (!std::getline(file, line))
        throw invalid_input_error("records csv: empty file: " + path);
    const auto header = split_row(line);

    std::vector<double> lambdas;
    std::vector<int> windows;
    for (const auto& name : header) {
        if (name.rfind("eedi_lambda_", 0) == 0)
            lambdas.push_back(to_double(name.substr(12)));
        else if (name.rfind("edi_w", 0) == 0)
            windows.push_back(static_cast<int>(to_double(name.substr(5))));
    }
    const std::size_t expected = 6 + lambdas.size() + windows.size() + 1;
    if (header.size() != expected)
        throw invalid_input_error("records csv: unexpected header layout: " + path);

    RecordsFile out;
    while (std::getline(file, line)) {
        if (line.empty()) continue;
        const auto cells = split_row(line);
        if (cells.size() != expected)
            throw invalid_input_error("records csv: short row in " + path);
        analysis::ExperimentRecord r;
        std::size_t c = 0;
        r.blocklength = static_cast<int>(to_double(cells[c++]));
        r.distance_km = to_double(cells[c++]);
        r.launch_power_dbm = to_double(cells[c++]);
        r.seed = std::strtoull(cells[c++].c_str(), nullptr, 10);
        r.effective_snr_db = to_double(cells[c++]);
        r.kurtosis = to_double(cells[c++]);
        for (double lambda : lambdas) r.eedi.emplace_back(lambda, to_double(cells[c++]));
        for (int window : windows) r.edi.emplace_back(window, to_double(cells[c++]));
        out.energy_files.push_back(cells[c++]);
        out.records.push_back(std::move(r));
    }
    return out;
}

void write_correlation_csv(const std::string& path,
                           const analysis::CorrelationCurve& curve) {
    auto file = open_out(path);
    file << "lambda,abs_rp\n";
    for (std::size_t i = 0; i < curve.lambda_grid.size(); ++i)
        file << format_double(curve.lambda_grid[i]) << ','
             << format_double(curve.abs_rp[i]) << '\n';
}

analysis::CorrelationCurve read_correlation_csv(const std::string& path) {
    auto file = open_in(path);
    std::string line;
    if (!std::getline(file, line))
        throw invalid_input_error("correlation csv: empty file: " + path);
    analysis::CorrelationCurve curve;
    double best = -1.0;
    while (std::getline(file, line)) {
        if (line.empty()) continue;
        const auto cells = split_row(line);
        if (cells.size() < 2)
            throw invalid_input_error("correlation csv: short row in " + path);
        const double lambda = to_double(cells[0]);
        const double rp = to_double(cells[1]);
        curve.lambda_grid.push_back(lambda);
        curve.abs_rp.push_back(rp);
        if (rp > best) {
            best = rp;
            curve.lambda_star = lambda;
            curve.rp_star = rp;
        }
    }
    return curve;
}

} // namespace nlishape::io
