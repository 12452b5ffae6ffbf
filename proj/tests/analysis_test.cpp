#include "nlishape/analysis.hpp"

#include "nlishape/channel.hpp"
#include "nlishape/errors.hpp"
#include "nlishape/metrics.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace nlishape;
using namespace nlishape::analysis;

namespace {

/// Records with matcher-generated energy series of increasing blocklength
/// and SNR planted as an exact affine function of EEDI at planted_lambda.
std::vector<ExperimentRecord> planted_records(double planted_lambda) {
    const auto alphabet = testutil::shaped64_alphabet();
    std::vector<ExperimentRecord> records;
    for (int n : {10, 50, 200, 1000, 4000}) {
        for (std::uint64_t seed = 1; seed <= 2; ++seed) {
            auto seq = shaping::generate_shaped_symbols(alphabet, n, (8000 + n - 1) / n, seed);
            seq.symbols.resize(8000);
            ExperimentRecord r;
            r.blocklength = n;
            r.distance_km = 320.0;
            r.seed = seed;
            r.tx_energies = metrics::symbol_energies(seq.symbols);
            records.push_back(std::move(r));
        }
    }
    // Per-blocklength mean EEDI at the planted lambda drives the SNR.
    for (auto& r : records) {
        const double value = measured_eedi(r.tx_energies, planted_lambda, 1e-6, 1024);
        r.effective_snr_db = 30.0 - 3.0 * value;
    }
    return records;
}

} // namespace

TEST_SUITE_BEGIN("analysis");

TEST_CASE("pearson worked examples") {
    CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{6, 4, 2}) ==
          doctest::Approx(-1.0).epsilon(1e-12));

    // Direct formula oracle for the non-degenerate case.
    const std::vector<double> x{1, 2, 3, 4}, y{1, 3, 2, 4};
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - 2.5) * (y[i] - 2.5);
        sxx += (x[i] - 2.5) * (x[i] - 2.5);
        syy += (y[i] - 2.5) * (y[i] - 2.5);
    }
    CHECK(pearson(x, y) == doctest::Approx(sxy / std::sqrt(sxx * syy)).epsilon(1e-12));
    CHECK(pearson(x, y) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("pearson affine invariance") {
    const std::vector<double> x{0.3, 1.7, 2.2, 5.9, 4.4, 3.0};
    const std::vector<double> y{2.0, 0.5, 3.3, 4.1, 5.5, 1.2};
    const double base = pearson(x, y);
    for (double a : {2.5, -0.7}) {
        std::vector<double> transformed(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) transformed[i] = a * x[i] + 11.0;
        const double expected = a > 0 ? base : -base;
        CHECK(pearson(transformed, y) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("pearson error paths") {
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}),
                    invalid_input_error);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}),
                    invalid_input_error);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
                    degenerate_input_error);
}

TEST_CASE("ci95_halfwidth uses the Student-t quantile") {
    const std::vector<double> samples{1.0, 2.0, 3.0, 4.0, 5.0};
    metrics::RunningStat stat;
    for (double s : samples) stat.push(s);
    const double expected = 2.7764451052 * std::sqrt(stat.variance() / 5.0);
    CHECK(ci95_halfwidth(samples) == doctest::Approx(expected).epsilon(1e-6));
    CHECK(ci95_halfwidth(std::vector<double>{1.0}) == 0.0);
}

TEST_CASE("measured_eedi caps the truncation near lambda=1") {
    Rng rng(3);
    std::vector<double> energies(4096);
    for (auto& e : energies) e = 1.0 + rng.next_double();
    // Uncapped truncation for lambda=0.9999 would need ~276k samples.
    const double value = measured_eedi(energies, 0.9999, 1e-6, 1024);
    CHECK(std::isfinite(value));
    CHECK(value >= 0.0);
    // Below the cap the epsilon rule is untouched.
    const double plain = measured_eedi(energies, 0.9, 1e-6, 1024);
    const double exact = metrics::eedi_from_energies(energies, 0.9, 1e-6).value;
    CHECK(plain == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("channel_symbols truncates concatenated blocks to the requested length") {
    const auto alphabet = testutil::shaped64_alphabet();
    const auto seq = channel_symbols(alphabet, 5000, 16384, 7);
    CHECK(seq.symbols.size() == 16384);
    CHECK(seq.blocklength == 5000);
    const auto exact = channel_symbols(alphabet, 128, 1024, 7);
    CHECK(exact.symbols.size() == 1024);
}

TEST_CASE("optimize_lambda recovers a planted optimum") {
    const auto records = planted_records(0.9);
    const CorrelationCurve curve = optimize_lambda(records, LambdaGrid{0.6, 1.0, 1e-4});
    CHECK(curve.lambda_star == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(curve.rp_star > 0.999999);
    CHECK(curve.lambda_grid.size() == 4000);
    CHECK(curve.lambda_grid.front() == doctest::Approx(0.6));
    CHECK(curve.lambda_grid.back() == doctest::Approx(0.9999));

    // argmax consistency of the reported star values
    const auto max_it = std::max_element(curve.abs_rp.begin(), curve.abs_rp.end());
    CHECK(curve.rp_star == *max_it);
    CHECK(curve.rp_star >= curve.abs_rp.front());
    CHECK(curve.rp_star >= curve.abs_rp.back());
}

TEST_CASE("optimize_lambda is deterministic") {
    const auto records = planted_records(0.8);
    const CorrelationCurve a = optimize_lambda(records, LambdaGrid{0.6, 1.0, 1e-3});
    const CorrelationCurve b = optimize_lambda(records, LambdaGrid{0.6, 1.0, 1e-3});
    CHECK(a.lambda_grid == b.lambda_grid);
    CHECK(a.abs_rp == b.abs_rp);
    CHECK(a.lambda_star == b.lambda_star);
    CHECK(a.rp_star == b.rp_star);
}

TEST_CASE("optimize_lambda grid refinement moves lambda_star only slightly") {
    const auto records = planted_records(0.85);
    const CorrelationCurve coarse = optimize_lambda(records, LambdaGrid{0.6, 1.0, 1e-3});
    const CorrelationCurve fine = optimize_lambda(records, LambdaGrid{0.6, 1.0, 1e-4});
    CHECK(std::abs(coarse.lambda_star - fine.lambda_star) < 5e-3);
}

TEST_CASE("optimize_lambda never touches the channel") {
    const auto records = planted_records(0.9);
    const std::uint64_t before = channel::propagation_count();
    (void)optimize_lambda(records, LambdaGrid{0.6, 1.0, 1e-3});
    CHECK(channel::propagation_count() == before);
}

TEST_CASE("optimize_lambda requires three blocklengths and stored energies") {
    auto records = planted_records(0.9);
    std::vector<ExperimentRecord> two;
    for (const auto& r : records)
        if (r.blocklength <= 50) two.push_back(r);
    CHECK_THROWS_AS(optimize_lambda(two, LambdaGrid{}), invalid_input_error);

    auto stripped = records;
    for (auto& r : stripped) r.tx_energies.clear();
    CHECK_THROWS_AS(optimize_lambda(stripped, LambdaGrid{}), invalid_input_error);
}

TEST_CASE("eedi at high lambda separates short from long blocklengths without any channel") {
    const auto alphabet = testutil::shaped64_alphabet();
    auto mean_eedi = [&](int n) {
        double acc = 0.0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            auto seq = shaping::generate_shaped_symbols(alphabet, n, 10000 / n, seed);
            acc += metrics::eedi(seq.symbols, 0.99).value;
        }
        return acc / 5.0;
    };
    CHECK(mean_eedi(10) < mean_eedi(10000));
}

TEST_CASE("sweep_blocklengths fills every field and keeps canonical order") {
    SweepOptions options;
    options.blocklengths = {10, 50};
    options.seeds = 2;
    options.base_seed = 5;
    options.record_lambdas = {0.0, 0.9};
    options.edi_windows = {11};
    options.min_interior_samples = 256;

    channel::LinkConfig link;
    link.num_spans = 1;
    link.step_km = 1.0;
    channel::WdmConfig wdm;
    wdm.num_channels = 1;
    wdm.samples_per_symbol = 4;
    wdm.symbols_per_channel = 1024;
    wdm.guard_symbols = 64;
    wdm.rrc_span_symbols = 64;

    const auto records =
        sweep_blocklengths(options, testutil::shaped64_alphabet(), link, wdm);
    REQUIRE(records.size() == 4);
    CHECK(records[0].blocklength == 10);
    CHECK(records[0].seed == 5);
    CHECK(records[1].blocklength == 10);
    CHECK(records[1].seed == 6);
    CHECK(records[2].blocklength == 50);
    CHECK(records[3].blocklength == 50);

    for (const auto& r : records) {
        CHECK(r.distance_km == 80.0);
        CHECK(std::isfinite(r.effective_snr_db));
        CHECK(r.eedi.size() == 2);
        CHECK(r.edi.size() == 1);
        CHECK(r.kurtosis > 1.0);
        CHECK(r.tx_energies.size() == 1024);
    }

    // Same seed and blocklength, same record: byte-level reproducibility.
    const auto again =
        sweep_blocklengths(options, testutil::shaped64_alphabet(), link, wdm);
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].effective_snr_db == again[i].effective_snr_db);
        CHECK(records[i].tx_energies == again[i].tx_energies);
    }
}

TEST_CASE("lambda_vs_distance reports one sorted point per distance") {
    auto near = planted_records(0.8);
    auto far = planted_records(0.95);
    for (auto& r : near) r.distance_km = 160.0;
    for (auto& r : far) r.distance_km = 480.0;

    const std::vector<std::vector<ExperimentRecord>> sets{far, near};
    const auto points = lambda_vs_distance(sets, LambdaGrid{0.6, 1.0, 1e-3});
    REQUIRE(points.size() == 2);
    CHECK(points[0].distance_km == 160.0);
    CHECK(points[1].distance_km == 480.0);
    CHECK(points[0].lambda_star == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(points[1].lambda_star == doctest::Approx(0.95).epsilon(1e-9));
    CHECK(points[1].lambda_star > points[0].lambda_star);
}

TEST_CASE("aggregate_by_blocklength averages across seeds") {
    std::vector<ExperimentRecord> records(4);
    records[0] = {10, 80.0, -2.0, 1, 20.0, {}, {}, 0.0, {}};
    records[1] = {10, 80.0, -2.0, 2, 22.0, {}, {}, 0.0, {}};
    records[2] = {50, 80.0, -2.0, 1, 19.0, {}, {}, 0.0, {}};
    records[3] = {50, 80.0, -2.0, 2, 17.0, {}, {}, 0.0, {}};
    const auto aggregates = aggregate_by_blocklength(records);
    REQUIRE(aggregates.size() == 2);
    CHECK(aggregates[0].blocklength == 10);
    CHECK(aggregates[0].snr_mean_db == doctest::Approx(21.0));
    CHECK(aggregates[0].runs == 2);
    CHECK(aggregates[1].blocklength == 50);
    CHECK(aggregates[1].snr_mean_db == doctest::Approx(18.0));
}

TEST_SUITE_END();
