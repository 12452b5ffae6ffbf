#include "nlishape/channel.hpp"

#include "nlishape/errors.hpp"
#include "nlishape/fft.hpp"
#include "nlishape/metrics.hpp"
#include "nlishape/rng.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

using namespace nlishape;
using namespace nlishape::channel;

namespace {

std::vector<std::complex<double>> random_qpsk(std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::complex<double>> symbols(count);
    for (auto& s : symbols)
        s = {static_cast<double>(rng.next_sign()), static_cast<double>(rng.next_sign())};
    return symbols;
}

LinkConfig test_link() {
    LinkConfig link;
    link.span_length_km = 80.0;
    link.num_spans = 1;
    link.step_km = 0.5;
    return link;
}

WdmConfig single_channel_wdm(int symbols, int sps = 4, int guard = 128) {
    WdmConfig wdm;
    wdm.num_channels = 1;
    wdm.samples_per_symbol = sps;
    wdm.symbols_per_channel = symbols;
    wdm.guard_symbols = guard;
    return wdm;
}

Waveform shaped_waveform(const shaping::SymbolSequence& seq, const WdmConfig& wdm) {
    Waveform w = rrc_shape(seq.symbols, wdm.samples_per_symbol, wdm.rolloff,
                           wdm.rrc_span_symbols, wdm.symbol_rate_gbd);
    scale_mean_power(w, wdm.launch_power_dbm);
    return w;
}

shaping::SymbolSequence test_sequence(int symbols, std::uint64_t seed) {
    auto seq = shaping::generate_shaped_symbols(testutil::shaped64_alphabet(), 10,
                                                (symbols + 9) / 10, seed);
    seq.symbols.resize(static_cast<std::size_t>(symbols));
    return seq;
}

} // namespace

TEST_SUITE_BEGIN("channel");

TEST_CASE("rrc taps are unit energy and symmetric") {
    const auto taps = rrc_taps(8, 0.1, 64);
    CHECK(taps.size() == 64 * 8 + 1);
    double energy = 0.0;
    for (double t : taps) energy += t * t;
    CHECK(energy == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < taps.size() / 2; ++i)
        CHECK(taps[i] == doctest::Approx(taps[taps.size() - 1 - i]).epsilon(1e-12));
}

TEST_CASE("rrc_shape of an impulse reproduces the impulse response") {
    std::vector<std::complex<double>> symbols(64, {0.0, 0.0});
    symbols[0] = {1.0, 0.0};
    const int sps = 8, span = 16;
    const auto taps = rrc_taps(sps, 0.1, span);
    const auto wave = rrc_shape(symbols, sps, 0.1, span, 32.0);
    REQUIRE(wave.samples.size() == symbols.size() * sps);

    const std::size_t n = wave.samples.size();
    const std::size_t center = (taps.size() - 1) / 2;
    for (std::size_t i = 0; i < taps.size(); ++i) {
        // Zero-phase circular embedding: tap offsets wrap around the end.
        const std::size_t pos = (i >= center) ? i - center : n - (center - i);
        CHECK(wave.samples[pos].real() == doctest::Approx(taps[i]).epsilon(1e-12));
        CHECK(std::abs(wave.samples[pos].imag()) < 1e-12);
    }
}

TEST_CASE("rrc matched-filter cascade is transparent beyond 60 dB") {
    const auto symbols = random_qpsk(512, 77);
    const int sps = 8;
    for (int span : {64, 128}) {
        const auto taps = rrc_taps(sps, 0.1, span);
        const auto shaped = rrc_shape(symbols, sps, 0.1, span, 32.0);
        const auto filtered = testutil::circular_filter(shaped.samples, taps);
        std::vector<std::complex<double>> recovered(symbols.size());
        for (std::size_t k = 0; k < symbols.size(); ++k)
            recovered[k] = filtered[k * sps];
        const auto est = estimate_effective_snr(recovered, symbols);
        CHECK(est.snr_db > 60.0);
    }
}

TEST_CASE("scale_mean_power hits the requested launch power") {
    auto wave = rrc_shape(random_qpsk(256, 3), 4, 0.1, 32, 32.0);
    scale_mean_power(wave, -2.0);
    const double power_mw = wave.mean_power_w() * 1e3;
    const double error_db = std::abs(10.0 * std::log10(power_mw) - (-2.0));
    CHECK(error_db < 0.01);
}

TEST_CASE("build_wdm with one channel is the identity") {
    const auto seq = test_sequence(256, 5);
    WdmConfig wdm = single_channel_wdm(256);
    const Waveform w = shaped_waveform(seq, wdm);
    const Waveform out = build_wdm(std::vector<Waveform>{w}, 50.0);
    CHECK(out.samples == w.samples);
}

TEST_CASE("build_wdm places tones at their channel offsets") {
    const double rate = 128.0;
    const std::size_t n = 4096;
    Waveform tone_a, zero, tone_b;
    tone_a.sample_rate_ghz = zero.sample_rate_ghz = tone_b.sample_rate_ghz = rate;
    tone_a.samples.assign(n, {1.0, 0.0});
    zero.samples.assign(n, {0.0, 0.0});
    tone_b.samples.assign(n, {1.0, 0.0});

    const double spacing = 32.0;
    const auto out = build_wdm(std::vector<Waveform>{tone_a, zero, tone_b}, spacing);

    fft::Buffer buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = out.samples[i];
    fft::forward(buf);
    std::vector<std::size_t> peaks;
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(buf[k]) > 0.5 * static_cast<double>(n)) peaks.push_back(k);

    const auto bin_of = [&](double freq_ghz) {
        double f = freq_ghz / rate * static_cast<double>(n);
        return static_cast<std::size_t>(f < 0 ? f + static_cast<double>(n) : f);
    };
    REQUIRE(peaks.size() == 2);
    CHECK(((peaks[0] == bin_of(-spacing) && peaks[1] == bin_of(spacing)) ||
           (peaks[0] == bin_of(spacing) && peaks[1] == bin_of(-spacing))));
}

TEST_CASE("build_wdm conserves the per-channel power sum") {
    WdmConfig wdm;
    wdm.num_channels = 3;
    wdm.symbols_per_channel = 1024;
    wdm.guard_symbols = 64;
    std::vector<Waveform> channels;
    double power_sum = 0.0;
    for (int ch = 0; ch < 3; ++ch) {
        const auto seq = test_sequence(1024, 100 + static_cast<std::uint64_t>(ch));
        Waveform w = rrc_shape(seq.symbols, wdm.samples_per_symbol, wdm.rolloff,
                               wdm.rrc_span_symbols, wdm.symbol_rate_gbd);
        scale_mean_power(w, wdm.launch_power_dbm);
        power_sum += w.mean_power_w();
        channels.push_back(std::move(w));
    }
    const Waveform out = build_wdm(channels, wdm.channel_spacing_ghz);
    const double ratio_db = 10.0 * std::log10(out.mean_power_w() / power_sum);
    CHECK(std::abs(ratio_db) < 0.05);
}

TEST_CASE("build_wdm rejects mismatched channels") {
    Waveform a, b, c;
    a.sample_rate_ghz = b.sample_rate_ghz = 128.0;
    c.sample_rate_ghz = 64.0;
    a.samples.assign(64, {1.0, 0.0});
    b.samples.assign(32, {1.0, 0.0});
    c.samples.assign(64, {1.0, 0.0});
    CHECK_THROWS_AS(build_wdm(std::vector<Waveform>{a, b, c}, 50.0), config_error);
    CHECK_THROWS_AS(build_wdm(std::vector<Waveform>{a, a}, 50.0), config_error);
}

TEST_CASE("ssfm_span with all effects off is the identity") {
    LinkConfig link = test_link();
    link.loss_db_per_km = 0.0;
    link.dispersion_ps_nm_km = 0.0;
    link.gamma_per_w_km = 0.0;
    const auto seq = test_sequence(1024, 7);
    const WdmConfig wdm = single_channel_wdm(1024);
    const Waveform in = shaped_waveform(seq, wdm);
    const Waveform out = ssfm_span(in, link);
    for (std::size_t i = 0; i < in.samples.size(); ++i)
        CHECK(std::abs(out.samples[i] - in.samples[i]) <= 1e-12);
}

TEST_CASE("ssfm_span reduces to the self-phase-modulation closed form") {
    LinkConfig link = test_link();
    link.loss_db_per_km = 0.0;
    link.dispersion_ps_nm_km = 0.0;
    link.step_km = 0.1;
    const auto seq = test_sequence(512, 11);
    const WdmConfig wdm = single_channel_wdm(512);
    const Waveform in = shaped_waveform(seq, wdm);
    const Waveform out = ssfm_span(in, link);

    for (std::size_t i = 0; i < in.samples.size(); ++i) {
        const double theta =
            link.gamma_per_w_km * std::norm(in.samples[i]) * link.span_length_km;
        const std::complex<double> expected =
            in.samples[i] * std::complex<double>(std::cos(theta), std::sin(theta));
        CHECK(std::abs(out.samples[i] - expected) <= 1e-9);
        CHECK(std::abs(std::abs(out.samples[i]) - std::abs(in.samples[i])) <= 1e-9);
    }
}

TEST_CASE("dispersion inverts exactly in the frequency domain") {
    LinkConfig link = test_link();
    link.loss_db_per_km = 0.0;
    link.gamma_per_w_km = 0.0;
    const auto seq = test_sequence(1024, 13);
    const WdmConfig wdm = single_channel_wdm(1024);
    const Waveform in = shaped_waveform(seq, wdm);
    const Waveform out = ssfm_span(in, link);

    // Oracle: conjugate dispersion phase applied to the output spectrum.
    const std::size_t n = out.samples.size();
    fft::Buffer buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = out.samples[i];
    fft::forward(buf);
    const double beta2_ns2 = link.beta2_ps2_per_km() * 1e-6;
    for (std::size_t k = 0; k < n; ++k) {
        const double half = static_cast<double>(n) / 2.0;
        double f = static_cast<double>(k);
        if (f >= half) f -= static_cast<double>(n);
        const double omega = 2.0 * std::numbers::pi * f * out.sample_rate_ghz /
                             static_cast<double>(n);
        const double phase = -0.5 * beta2_ns2 * omega * omega * link.span_length_km;
        buf[k] *= std::complex<double>(std::cos(phase), std::sin(phase));
    }
    fft::inverse(buf);

    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        err += std::norm(buf[i] - in.samples[i]);
        ref += std::norm(in.samples[i]);
    }
    CHECK(std::sqrt(err / ref) < 1e-6);
}

TEST_CASE("ssfm_span conserves energy without loss") {
    LinkConfig link = test_link();
    link.loss_db_per_km = 0.0;
    link.step_km = 0.25;
    const auto seq = test_sequence(1024, 17);
    const WdmConfig wdm = single_channel_wdm(1024);
    const Waveform in = shaped_waveform(seq, wdm);
    const Waveform out = ssfm_span(in, link);
    CHECK(out.mean_power_w() ==
          doctest::Approx(in.mean_power_w()).epsilon(1e-9));
}

TEST_CASE("edfa with noise disabled is a pure scaling") {
    const auto seq = test_sequence(256, 19);
    const WdmConfig wdm = single_channel_wdm(256);
    const Waveform in = shaped_waveform(seq, wdm);
    const double gain_db = 15.2;
    const Waveform out = edfa(in, gain_db, -std::numeric_limits<double>::infinity(),
                              1550.0, 1);
    const double amp = std::pow(10.0, gain_db / 20.0);
    for (std::size_t i = 0; i < in.samples.size(); ++i)
        CHECK(out.samples[i] == amp * in.samples[i]);
}

TEST_CASE("edfa noise density matches the spontaneous emission formula") {
    Waveform silence;
    silence.sample_rate_ghz = 256.0;
    silence.samples.assign(std::size_t{1} << 20, {0.0, 0.0});
    const double gain_db = 15.2, nf_db = 6.0, wavelength_nm = 1550.0;
    const Waveform out = edfa(silence, gain_db, nf_db, wavelength_nm, 99);

    const double gain = std::pow(10.0, gain_db / 10.0);
    const double n_sp = std::pow(10.0, nf_db / 10.0) / 2.0;
    const double photon_hz = 299792458.0 / (wavelength_nm * 1e-9);
    const double expected_w =
        (gain - 1.0) * 6.62607015e-34 * photon_hz * n_sp * silence.sample_rate_ghz * 1e9;

    CHECK(out.mean_power_w() == doctest::Approx(expected_w).epsilon(0.05));

    // Spot-check whiteness: the in-band slice carries its share of the power.
    const std::size_t n = out.samples.size();
    fft::Buffer buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = out.samples[i];
    fft::forward(buf);
    double band_power = 0.0;
    for (std::size_t k = n / 8; k < n / 4; ++k) band_power += std::norm(buf[k]);
    band_power /= static_cast<double>(n) * static_cast<double>(n);
    CHECK(band_power == doctest::Approx(expected_w / 8.0).epsilon(0.05));
}

TEST_CASE("edfa output is deterministic in the seed") {
    const auto seq = test_sequence(512, 23);
    const WdmConfig wdm = single_channel_wdm(512);
    const Waveform in = shaped_waveform(seq, wdm);
    const Waveform a = edfa(in, 15.2, 6.0, 1550.0, 42);
    const Waveform b = edfa(in, 15.2, 6.0, 1550.0, 42);
    const Waveform c = edfa(in, 15.2, 6.0, 1550.0, 43);
    CHECK(a.samples == b.samples);
    CHECK(a.samples != c.samples);
}

TEST_CASE("propagate_link composes span and amplifier") {
    LinkConfig link = test_link();
    const auto seq = test_sequence(512, 29);
    const WdmConfig wdm = single_channel_wdm(512);
    const Waveform in = shaped_waveform(seq, wdm);

    const std::uint64_t master = 7;
    const Waveform via_link = propagate_link(in, link, master);
    const Waveform manual = edfa(ssfm_span(in, link), link.span_loss_db(),
                                 link.noise_figure_db, link.center_wavelength_nm,
                                 span_noise_seed(master, 0));
    CHECK(via_link.samples == manual.samples);
}

TEST_CASE("propagate_link restores the launch power when noiseless") {
    LinkConfig link = test_link();
    link.gamma_per_w_km = 0.0;
    link.noise_figure_db = -std::numeric_limits<double>::infinity();
    link.num_spans = 2;
    const auto seq = test_sequence(512, 31);
    const WdmConfig wdm = single_channel_wdm(512);
    const Waveform in = shaped_waveform(seq, wdm);
    const Waveform out = propagate_link(in, link, 1);
    CHECK(std::abs(10.0 * std::log10(out.mean_power_w() / in.mean_power_w())) < 0.01);
}

TEST_CASE("linear multi-span link recovers the symbols after dispersion compensation") {
    LinkConfig link = test_link();
    link.gamma_per_w_km = 0.0;
    link.noise_figure_db = -std::numeric_limits<double>::infinity();
    link.num_spans = 4;
    const WdmConfig wdm = single_channel_wdm(2048, 8, 128);
    const auto seq = test_sequence(2048, 37);
    const Waveform in = shaped_waveform(seq, wdm);
    const Waveform out = propagate_link(in, link, 3);
    const RxResult rx = rx_central_channel(out, wdm, link, seq);
    CHECK(rx.effective_snr_db > 50.0);
}

TEST_CASE("back-to-back receiver is limited only by filter truncation") {
    LinkConfig link = test_link();
    link.num_spans = 0;
    const WdmConfig wdm = single_channel_wdm(2048, 8, 128);
    const auto seq = test_sequence(2048, 41);
    const Waveform in = shaped_waveform(seq, wdm);
    const RxResult rx = rx_central_channel(in, wdm, link, seq);
    CHECK(rx.effective_snr_db > 50.0);
}

TEST_CASE("snr estimator saturates for exact and scaled copies") {
    const auto symbols = testutil::iid_shaped_symbols(4096, 43);
    CHECK(estimate_effective_snr(symbols, symbols).snr_db == 99.0);

    std::vector<std::complex<double>> rotated(symbols.size());
    const std::complex<double> factor =
        2.0 * std::exp(std::complex<double>(0.0, std::numbers::pi / 4.0));
    std::transform(symbols.begin(), symbols.end(), rotated.begin(),
                   [&](const std::complex<double>& s) { return factor * s; });
    const auto est = estimate_effective_snr(rotated, symbols);
    CHECK(est.snr_db == 99.0);
    CHECK(est.scale.real() == doctest::Approx(factor.real()).epsilon(1e-12));
    CHECK(est.scale.imag() == doctest::Approx(factor.imag()).epsilon(1e-12));
}

TEST_CASE("snr estimator recovers a known additive noise level") {
    const auto symbols = testutil::iid_shaped_symbols(100000, 47);
    double mean_energy = 0.0;
    for (const auto& s : symbols) mean_energy += std::norm(s);
    mean_energy /= static_cast<double>(symbols.size());

    const double noise_var = mean_energy / 10.0;  // target SNR 10 dB
    Rng rng(53);
    std::vector<std::complex<double>> noisy(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const auto [g1, g2] = rng.next_gaussian_pair();
        noisy[i] = symbols[i] + std::sqrt(noise_var / 2.0) * std::complex<double>(g1, g2);
    }
    const auto est = estimate_effective_snr(noisy, symbols);
    CHECK(est.snr_db == doctest::Approx(10.0).epsilon(0.01));
}

TEST_CASE("receiver finds an injected integer sampling offset") {
    LinkConfig link = test_link();
    link.num_spans = 0;
    const WdmConfig wdm = single_channel_wdm(1024, 8, 64);
    const auto seq = test_sequence(1024, 59);
    Waveform in = shaped_waveform(seq, wdm);

    std::rotate(in.samples.rbegin(), in.samples.rbegin() + 3, in.samples.rend());
    const RxResult rx = rx_central_channel(in, wdm, link, seq);
    CHECK(rx.sampling_offset == 3);
    CHECK(rx.effective_snr_db > 50.0);
}

TEST_CASE("effective snr falls as launch power rises in the noiseless nonlinear regime") {
    LinkConfig link = test_link();
    link.noise_figure_db = -std::numeric_limits<double>::infinity();
    link.step_km = 0.25;
    const WdmConfig base = single_channel_wdm(2048, 8, 128);
    const auto seq = test_sequence(2048, 61);

    double previous = 1e9;
    for (double power_dbm : {-6.0, -4.0, -2.0, 0.0}) {
        WdmConfig wdm = base;
        wdm.launch_power_dbm = power_dbm;
        const Waveform in = shaped_waveform(seq, wdm);
        const Waveform out = propagate_link(in, link, 5);
        const RxResult rx = rx_central_channel(out, wdm, link, seq);
        CHECK(rx.effective_snr_db < previous);
        previous = rx.effective_snr_db;
    }
}

TEST_CASE("swapping the noise seed moves the snr less than the seed-batch confidence width") {
    LinkConfig link = test_link();
    const WdmConfig wdm = single_channel_wdm(2048, 4, 128);
    const auto seq = test_sequence(2048, 67);
    const Waveform in = shaped_waveform(seq, wdm);

    auto snr_for = [&](std::uint64_t noise_seed) {
        const Waveform out = propagate_link(in, link, noise_seed);
        return rx_central_channel(out, wdm, link, seq).effective_snr_db;
    };
    std::vector<double> batch_a, batch_b;
    for (std::uint64_t s = 0; s < 10; ++s) batch_a.push_back(snr_for(1000 + s));
    for (std::uint64_t s = 0; s < 10; ++s) batch_b.push_back(snr_for(2000 + s));

    auto mean = [](const std::vector<double>& v) {
        double acc = 0.0;
        for (double x : v) acc += x;
        return acc / static_cast<double>(v.size());
    };
    auto halfwidth = [&](const std::vector<double>& v) {
        metrics::RunningStat stat;
        for (double x : v) stat.push(x);
        return 2.262 * std::sqrt(stat.variance() / static_cast<double>(v.size()));
    };
    CHECK(std::abs(mean(batch_a) - mean(batch_b)) <
          halfwidth(batch_a) + halfwidth(batch_b));
}

TEST_CASE("ssfm_span rejects a step that does not divide the span") {
    LinkConfig link = test_link();
    link.step_km = 0.3;
    const auto seq = test_sequence(256, 71);
    const WdmConfig wdm = single_channel_wdm(256);
    CHECK_THROWS_AS(ssfm_span(shaped_waveform(seq, wdm), link), config_error);
}

TEST_SUITE_END();
