#include "nlishape/config.hpp"

#include "nlishape/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace nlishape {

std::string format_double(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    for (int precision : {6, 9, 12, 15, 17}) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

double parse_double(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v == "inf") return std::numeric_limits<double>::infinity();
    if (v == "-inf") return -std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double parsed = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size())
        throw config_error(key + ": expected a number, got '" + v + "'");
    return parsed;
}

long long parse_integer(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    char* end = nullptr;
    const long long parsed = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size())
        throw config_error(key + ": expected an integer, got '" + v + "'");
    return parsed;
}

int parse_int(const std::string& key, const std::string& value) {
    return static_cast<int>(parse_integer(key, value));
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size())
        throw config_error(key + ": expected an unsigned integer, got '" + v + "'");
    return parsed;
}

bool parse_bool(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw config_error(key + ": expected a boolean, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string current;
    std::istringstream stream(value);
    while (std::getline(stream, current, ',')) items.push_back(trim(current));
    if (!items.empty() && items.back().empty()) items.pop_back();
    return items;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& item : split_list(value)) out.push_back(parse_double(key, item));
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    for (const auto& item : split_list(value)) out.push_back(parse_int(key, item));
    return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ", ";
        if constexpr (std::is_same_v<T, double>)
            out += format_double(values[i]);
        else
            out += std::to_string(values[i]);
    }
    return out;
}

void set_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
    // shaping
    if (key == "shaping.levels") c.shaping.levels = parse_double_list(key, value);
    else if (key == "shaping.probabilities") c.shaping.probabilities = parse_double_list(key, value);
    else if (key == "shaping.blocklengths") c.shaping.blocklengths = parse_int_list(key, value);
    else if (key == "shaping.blocks_per_run") c.shaping.blocks_per_run = parse_int(key, value);
    else if (key == "shaping.seeds") c.shaping.seeds = parse_int(key, value);
    else if (key == "shaping.base_seed") c.shaping.base_seed = parse_u64(key, value);
    // link
    else if (key == "link.span_length_km") c.link.span_length_km = parse_double(key, value);
    else if (key == "link.num_spans") c.link.num_spans = parse_int(key, value);
    else if (key == "link.loss_db_per_km") c.link.loss_db_per_km = parse_double(key, value);
    else if (key == "link.dispersion_ps_nm_km") c.link.dispersion_ps_nm_km = parse_double(key, value);
    else if (key == "link.gamma_per_w_km") c.link.gamma_per_w_km = parse_double(key, value);
    else if (key == "link.noise_figure_db") c.link.noise_figure_db = parse_double(key, value);
    else if (key == "link.center_wavelength_nm") c.link.center_wavelength_nm = parse_double(key, value);
    else if (key == "link.step_km") c.link.step_km = parse_double(key, value);
    // wdm
    else if (key == "wdm.num_channels") c.wdm.num_channels = parse_int(key, value);
    else if (key == "wdm.symbol_rate_gbd") c.wdm.symbol_rate_gbd = parse_double(key, value);
    else if (key == "wdm.channel_spacing_ghz") c.wdm.channel_spacing_ghz = parse_double(key, value);
    else if (key == "wdm.rolloff") c.wdm.rolloff = parse_double(key, value);
    else if (key == "wdm.samples_per_symbol") c.wdm.samples_per_symbol = parse_int(key, value);
    else if (key == "wdm.launch_power_dbm") c.wdm.launch_power_dbm = parse_double(key, value);
    else if (key == "wdm.symbols_per_channel") c.wdm.symbols_per_channel = parse_int(key, value);
    else if (key == "wdm.guard_symbols") c.wdm.guard_symbols = parse_int(key, value);
    else if (key == "wdm.rrc_span_symbols") c.wdm.rrc_span_symbols = parse_int(key, value);
    // metrics
    else if (key == "metrics.lambdas") c.metrics.lambdas = parse_double_list(key, value);
    else if (key == "metrics.epsilon") c.metrics.epsilon = parse_double(key, value);
    else if (key == "metrics.edi_windows") c.metrics.edi_windows = parse_int_list(key, value);
    else if (key == "metrics.min_interior_samples") c.metrics.min_interior_samples = parse_int(key, value);
    // analysis
    else if (key == "analysis.lambda_lo") c.analysis.lambda_lo = parse_double(key, value);
    else if (key == "analysis.lambda_hi") c.analysis.lambda_hi = parse_double(key, value);
    else if (key == "analysis.lambda_step") c.analysis.lambda_step = parse_double(key, value);
    else if (key == "analysis.span_counts") c.analysis.span_counts = parse_int_list(key, value);
    // output
    else if (key == "output.directory") c.output.directory = trim(value);
    else if (key == "output.write_symbols") c.output.write_symbols = parse_bool(key, value);
    else if (key == "output.write_energies") c.output.write_energies = parse_bool(key, value);
    // runtime
    else if (key == "runtime.workers") c.runtime.workers = parse_int(key, value);
    else throw config_error("unknown config key: " + key);
}

void parse_into(ExperimentConfig& config, std::string_view text) {
    std::string section;
    std::size_t line_number = 0;
    std::istringstream stream{std::string(text)};
    std::string raw;
    while (std::getline(stream, raw)) {
        ++line_number;
        const std::size_t comment = raw.find_first_of("#;");
        if (comment != std::string::npos) raw.erase(comment);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("line " + std::to_string(line_number) +
                                   ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(line_number) +
                               ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.find('.') == std::string::npos && !section.empty()) key = section + "." + key;
        set_key(config, key, value);
    }
}

} // namespace

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig config;
    parse_into(config, text);
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw config_error("cannot open config file: " + path);
    std::ostringstream content;
    content << file.rdbuf();

    ExperimentConfig config;
    // The environment supplies only the default; explicit keys win.
    if (const char* env = std::getenv("NLISHAPE_OUTPUT_DIR"); env && *env)
        config.output.directory = env;
    parse_into(config, content.str());
    config.validate();
    return config;
}

void apply_override(ExperimentConfig& config, std::string_view assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw config_error("override must have the form key.path=value: " +
                           std::string(assignment));
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    set_key(config, key, value);
}

void ExperimentConfig::validate() const {
    alphabet().validate();
    if (shaping.blocklengths.empty())
        throw config_error("shaping.blocklengths: required, no default");
    for (int n : shaping.blocklengths)
        if (n < 1) throw config_error("shaping.blocklengths: entries must be >= 1");
    if (shaping.blocks_per_run < 1)
        throw config_error("shaping.blocks_per_run: must be >= 1");
    if (shaping.seeds < 1) throw config_error("shaping.seeds: must be >= 1");

    link.validate();
    wdm.validate();

    for (double lambda : metrics.lambdas)
        if (lambda < 0.0 || lambda > 1.0)
            throw config_error("metrics.lambdas: entries must be in [0, 1]");
    if (!(metrics.epsilon > 0.0) || metrics.epsilon > 1.0)
        throw config_error("metrics.epsilon: must be in (0, 1]");
    for (int w : metrics.edi_windows)
        if (w < 1 || w % 2 == 0)
            throw config_error("metrics.edi_windows: entries must be odd and positive");
    if (metrics.min_interior_samples < 2)
        throw config_error("metrics.min_interior_samples: must be >= 2");

    if (analysis.lambda_lo < 0.0 || analysis.lambda_hi > 1.0 ||
        !(analysis.lambda_lo < analysis.lambda_hi))
        throw config_error("analysis.lambda_lo/lambda_hi: need 0 <= lo < hi <= 1");
    if (!(analysis.lambda_step > 0.0))
        throw config_error("analysis.lambda_step: must be > 0");
    for (int s : analysis.span_counts)
        if (s < 1) throw config_error("analysis.span_counts: entries must be >= 1");

    if (output.directory.empty()) throw config_error("output.directory: must not be empty");
    if (runtime.workers < 0) throw config_error("runtime.workers: must be >= 0");
}

shaping::AmplitudeAlphabet ExperimentConfig::alphabet() const {
    return shaping::AmplitudeAlphabet{shaping.levels, shaping.probabilities};
}

analysis::SweepOptions ExperimentConfig::sweep_options() const {
    analysis::SweepOptions options;
    options.blocklengths = shaping.blocklengths;
    options.seeds = shaping.seeds;
    options.base_seed = shaping.base_seed;
    options.record_lambdas = metrics.lambdas;
    options.edi_windows = metrics.edi_windows;
    options.epsilon = metrics.epsilon;
    options.min_interior_samples = metrics.min_interior_samples;
    options.workers = runtime.workers;
    options.keep_energies = true;
    return options;
}

analysis::LambdaGrid ExperimentConfig::lambda_grid() const {
    return analysis::LambdaGrid{analysis.lambda_lo, analysis.lambda_hi, analysis.lambda_step};
}

std::vector<int> ExperimentConfig::effective_span_counts() const {
    if (!analysis.span_counts.empty()) return analysis.span_counts;
    return {link.num_spans};
}

std::string render_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "[shaping]\n";
    out << "levels = " << join(c.shaping.levels) << "\n";
    out << "probabilities = " << join(c.shaping.probabilities) << "\n";
    out << "blocklengths = " << join(c.shaping.blocklengths) << "\n";
    out << "blocks_per_run = " << c.shaping.blocks_per_run << "\n";
    out << "seeds = " << c.shaping.seeds << "\n";
    out << "base_seed = " << c.shaping.base_seed << "\n";
    out << "\n[link]\n";
    out << "span_length_km = " << format_double(c.link.span_length_km) << "\n";
    out << "num_spans = " << c.link.num_spans << "\n";
    out << "loss_db_per_km = " << format_double(c.link.loss_db_per_km) << "\n";
    out << "dispersion_ps_nm_km = " << format_double(c.link.dispersion_ps_nm_km) << "\n";
    out << "gamma_per_w_km = " << format_double(c.link.gamma_per_w_km) << "\n";
    out << "noise_figure_db = " << format_double(c.link.noise_figure_db) << "\n";
    out << "center_wavelength_nm = " << format_double(c.link.center_wavelength_nm) << "\n";
    out << "step_km = " << format_double(c.link.step_km) << "\n";
    out << "\n[wdm]\n";
    out << "num_channels = " << c.wdm.num_channels << "\n";
    out << "symbol_rate_gbd = " << format_double(c.wdm.symbol_rate_gbd) << "\n";
    out << "channel_spacing_ghz = " << format_double(c.wdm.channel_spacing_ghz) << "\n";
    out << "rolloff = " << format_double(c.wdm.rolloff) << "\n";
    out << "samples_per_symbol = " << c.wdm.samples_per_symbol << "\n";
    out << "launch_power_dbm = " << format_double(c.wdm.launch_power_dbm) << "\n";
    out << "symbols_per_channel = " << c.wdm.symbols_per_channel << "\n";
    out << "guard_symbols = " << c.wdm.guard_symbols << "\n";
    out << "rrc_span_symbols = " << c.wdm.rrc_span_symbols << "\n";
    out << "\n[metrics]\n";
    out << "lambdas = " << join(c.metrics.lambdas) << "\n";
    out << "epsilon = " << format_double(c.metrics.epsilon) << "\n";
    out << "edi_windows = " << join(c.metrics.edi_windows) << "\n";
    out << "min_interior_samples = " << c.metrics.min_interior_samples << "\n";
    out << "\n[analysis]\n";
    out << "lambda_lo = " << format_double(c.analysis.lambda_lo) << "\n";
    out << "lambda_hi = " << format_double(c.analysis.lambda_hi) << "\n";
    out << "lambda_step = " << format_double(c.analysis.lambda_step) << "\n";
    if (!c.analysis.span_counts.empty())
        out << "span_counts = " << join(c.analysis.span_counts) << "\n";
    out << "\n[output]\n";
    out << "directory = " << c.output.directory << "\n";
    out << "write_symbols = " << (c.output.write_symbols ? "true" : "false") << "\n";
    out << "write_energies = " << (c.output.write_energies ? "true" : "false") << "\n";
    out << "\n[runtime]\n";
    out << "workers = " << c.runtime.workers << "\n";
    return out.str();
}

} // namespace nlishape
