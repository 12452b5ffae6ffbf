#include "commands.hpp"

#include "nlishape/config.hpp"
#include "nlishape/errors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_dir;
    int workers = -1;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("-c,--config", args.config_path, "experiment config file")->required();
    sub->add_option("--set", args.overrides,
                    "dotted-path override, e.g. --set link.num_spans=4 (repeatable)");
    sub->add_option("-o,--output", args.output_dir, "output directory override");
    sub->add_option("--workers", args.workers, "concurrent simulation jobs (0 = all cores)");
}

nlishape::ExperimentConfig resolve_config(const CommonArgs& args) {
    nlishape::ExperimentConfig config = nlishape::load_config(args.config_path);
    for (const std::string& assignment : args.overrides)
        nlishape::apply_override(config, assignment);
    if (!args.output_dir.empty()) config.output.directory = args.output_dir;
    if (args.workers >= 0) config.runtime.workers = args.workers;
    config.validate();
    return config;
}

int fail(const char* type, const std::string& message, int code) {
    const nlohmann::json err = {{"error", {{"type", type}, {"message", message}}}};
    std::cerr << err.dump() << "\n";
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-blocklength shaped transmission and metric correlation toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    int blocklength = -1;
    int num_blocks = -1;
    std::uint64_t shape_seed = 1;
    bool seed_given = false;
    std::string shape_out;
    std::string metrics_input;
    std::string metrics_json;
    std::string records_dir;

    CLI::App* shape = app.add_subcommand("shape", "generate a shaped symbol stream CSV");
    add_common(shape, args);
    shape->add_option("--n", blocklength, "blocklength (default: first configured)");
    shape->add_option("--blocks", num_blocks, "blocks to concatenate");
    shape->add_option("--seed", shape_seed, "generator seed")->each([&](const std::string&) {
        seed_given = true;
    });
    shape->add_option("--out", shape_out, "output CSV path");

    CLI::App* metrics = app.add_subcommand("metrics", "metrics of a symbol CSV as JSON");
    add_common(metrics, args);
    metrics->add_option("--input", metrics_input, "symbol CSV to analyze")->required();
    metrics->add_option("--json-out", metrics_json, "write JSON here instead of stdout");

    CLI::App* simulate = app.add_subcommand("simulate", "single transmission, rx_result.json");
    add_common(simulate, args);

    CLI::App* sweep = app.add_subcommand("sweep", "blocklength x seed sweep, records.csv");
    add_common(sweep, args);

    CLI::App* optimize =
        app.add_subcommand("optimize-lambda", "forgetting-factor search over a sweep");
    add_common(optimize, args);
    optimize->add_option("--records-dir", records_dir, "sweep directory to analyze");

    CLI::App* figures = app.add_subcommand("figures", "emit fig2/fig3/fig4 CSV data");
    add_common(figures, args);

    CLI11_PARSE(app, argc, argv);

    try {
        const nlishape::ExperimentConfig config = resolve_config(args);
        if (shape->parsed()) {
            const std::uint64_t seed = seed_given ? shape_seed : config.shaping.base_seed;
            return nlishape::cli::cmd_shape(config, blocklength, num_blocks, seed, shape_out);
        }
        if (metrics->parsed())
            return nlishape::cli::cmd_metrics(config, metrics_input, metrics_json);
        if (simulate->parsed()) return nlishape::cli::cmd_simulate(config);
        if (sweep->parsed()) return nlishape::cli::cmd_sweep(config);
        if (optimize->parsed())
            return nlishape::cli::cmd_optimize_lambda(config, records_dir);
        if (figures->parsed()) return nlishape::cli::cmd_figures(config);
        return fail("usage_error", "no subcommand", 1);
    } catch (const nlishape::config_error& e) {
        return fail("config_error", e.what(), 1);
    } catch (const nlishape::invalid_input_error& e) {
        return fail("invalid_input", e.what(), 1);
    } catch (const std::exception& e) {
        return fail("runtime_error", e.what(), 2);
    }
}
