#include "nlishape/channel.hpp"

#include "nlishape/errors.hpp"
#include "nlishape/fft.hpp"
#include "nlishape/rng.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

namespace nlishape::channel {

namespace {

constexpr double kSpeedOfLightNmPerPs = 299792.458;  // c in nm/ps
constexpr double kSpeedOfLightMPerS = 299792458.0;
constexpr double kPlanckJS = 6.62607015e-34;

std::atomic<std::uint64_t> g_propagation_count{0};

/// Angular frequency of FFT bin k in rad/ns for an N-point grid.
inline double bin_omega(std::size_t k, std::size_t n, double sample_rate_ghz) {
    const double half = static_cast<double>(n) / 2.0;
    double f = static_cast<double>(k);
    if (f >= half) f -= static_cast<double>(n);
    return 2.0 * std::numbers::pi * f * sample_rate_ghz / static_cast<double>(n);
}

void check_finite(const fft::Buffer& buf) {
    for (std::size_t i = 0; i < buf.size(); ++i) {
        if (!std::isfinite(buf[i].real()) || !std::isfinite(buf[i].imag()))
            throw numeric_error(
                "propagation produced a non-finite sample; reduce launch power or step size");
    }
}

/// FFT of the zero-phase circular embedding of a symmetric FIR.
std::vector<std::complex<double>> fir_spectrum(const std::vector<double>& taps,
                                               std::size_t n) {
    if (taps.size() > n)
        throw config_error("rrc filter span exceeds the waveform length");
    const std::size_t center = (taps.size() - 1) / 2;
    fft::Buffer buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = 0.0;
    buf[0] = taps[center];
    for (std::size_t o = 1; o <= center; ++o) {
        buf[o] = taps[center + o];
        buf[n - o] = taps[center - o];
    }
    fft::forward(buf);
    std::vector<std::complex<double>> spectrum(n);
    for (std::size_t i = 0; i < n; ++i) spectrum[i] = buf[i];
    return spectrum;
}

} // namespace

void LinkConfig::validate() const {
    if (!(span_length_km > 0.0)) throw config_error("link.span_length_km: must be > 0");
    if (num_spans < 0) throw config_error("link.num_spans: must be >= 0");
    if (loss_db_per_km < 0.0) throw config_error("link.loss_db_per_km: must be >= 0");
    if (gamma_per_w_km < 0.0) throw config_error("link.gamma_per_w_km: must be >= 0");
    if (!(center_wavelength_nm > 0.0))
        throw config_error("link.center_wavelength_nm: must be > 0");
    if (!(step_km > 0.0)) throw config_error("link.step_km: must be > 0");
    const double steps = span_length_km / step_km;
    if (std::abs(steps - std::round(steps)) > 1e-6 * steps)
        throw config_error("link.step_km: must divide span_length_km");
}

int LinkConfig::steps_per_span() const {
    return static_cast<int>(std::round(span_length_km / step_km));
}

double LinkConfig::beta2_ps2_per_km() const {
    return -dispersion_ps_nm_km * center_wavelength_nm * center_wavelength_nm /
           (2.0 * std::numbers::pi * kSpeedOfLightNmPerPs);
}

double LinkConfig::loss_linear_per_km() const {
    return loss_db_per_km * std::numbers::ln10 / 10.0;
}

bool LinkConfig::amplifier_noise_enabled() const {
    return std::isfinite(noise_figure_db);
}

void WdmConfig::validate() const {
    if (num_channels < 1 || num_channels % 2 == 0)
        throw config_error("wdm.num_channels: must be a positive odd integer");
    if (!(symbol_rate_gbd > 0.0)) throw config_error("wdm.symbol_rate_gbd: must be > 0");
    if (rolloff < 0.0 || rolloff > 1.0) throw config_error("wdm.rolloff: must be in [0, 1]");
    if (samples_per_symbol < 2) throw config_error("wdm.samples_per_symbol: must be >= 2");
    if (num_channels > 1) {
        if ((1.0 + rolloff) * symbol_rate_gbd > channel_spacing_ghz)
            throw config_error("wdm.channel_spacing_ghz: channels would overlap spectrally");
        if (sample_rate_ghz() <= num_channels * channel_spacing_ghz)
            throw config_error(
                "wdm.samples_per_symbol: simulation bandwidth does not cover the WDM spectrum");
    }
    if (symbols_per_channel < 16)
        throw config_error("wdm.symbols_per_channel: must be >= 16");
    if (guard_symbols < 0) throw config_error("wdm.guard_symbols: must be >= 0");
    if (2 * guard_symbols >= symbols_per_channel)
        throw config_error("wdm.guard_symbols: guards leave no symbols to measure");
    if (rrc_span_symbols < 2) throw config_error("wdm.rrc_span_symbols: must be >= 2");
    if ((rrc_span_symbols * samples_per_symbol) % 2 != 0)
        throw config_error("wdm.rrc_span_symbols: span times samples_per_symbol must be even");
}

double Waveform::mean_power_w() const {
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& s : samples) acc += s.real() * s.real() + s.imag() * s.imag();
    return acc / static_cast<double>(samples.size());
}

std::vector<double> rrc_taps(int sps, double rolloff, int span_symbols) {
    if (sps < 2) throw config_error("rrc_taps: samples per symbol must be >= 2");
    if (rolloff < 0.0 || rolloff > 1.0) throw config_error("rrc_taps: rolloff must be in [0, 1]");
    if (span_symbols < 1) throw config_error("rrc_taps: span must be >= 1 symbol");
    if ((span_symbols * sps) % 2 != 0)
        throw config_error("rrc_taps: span times sps must be even");

    const int half = span_symbols * sps / 2;
    std::vector<double> taps(static_cast<std::size_t>(2 * half + 1));
    const double beta = rolloff;
    for (int i = -half; i <= half; ++i) {
        const double t = static_cast<double>(i) / sps;  // in symbol periods
        double value;
        if (i == 0) {
            value = 1.0 - beta + 4.0 * beta / std::numbers::pi;
        } else if (beta > 0.0 && std::abs(std::abs(4.0 * beta * t) - 1.0) < 1e-9) {
            const double arg = std::numbers::pi / (4.0 * beta);
            value = (beta / std::numbers::sqrt2) *
                    ((1.0 + 2.0 / std::numbers::pi) * std::sin(arg) +
                     (1.0 - 2.0 / std::numbers::pi) * std::cos(arg));
        } else {
            const double num = std::sin(std::numbers::pi * t * (1.0 - beta)) +
                               4.0 * beta * t * std::cos(std::numbers::pi * t * (1.0 + beta));
            const double den = std::numbers::pi * t * (1.0 - 16.0 * beta * beta * t * t);
            value = num / den;
        }
        taps[static_cast<std::size_t>(i + half)] = value;
    }

    double energy = 0.0;
    for (double v : taps) energy += v * v;
    const double scale = 1.0 / std::sqrt(energy);
    for (double& v : taps) v *= scale;
    return taps;
}

Waveform rrc_shape(std::span<const std::complex<double>> symbols, int sps, double rolloff,
                   int span_symbols, double symbol_rate_gbd) {
    if (symbols.empty()) throw invalid_input_error("rrc_shape: empty symbol sequence");
    const std::vector<double> taps = rrc_taps(sps, rolloff, span_symbols);
    const std::size_t n = symbols.size() * static_cast<std::size_t>(sps);
    const auto spectrum = fir_spectrum(taps, n);

    fft::Buffer buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = 0.0;
    for (std::size_t k = 0; k < symbols.size(); ++k)
        buf[k * static_cast<std::size_t>(sps)] = symbols[k];
    fft::forward(buf);
    for (std::size_t i = 0; i < n; ++i) buf[i] *= spectrum[i];
    fft::inverse(buf);

    Waveform out;
    out.sample_rate_ghz = symbol_rate_gbd * sps;
    out.samples.assign(buf.data(), buf.data() + n);
    return out;
}

double scale_mean_power(Waveform& waveform, double target_dbm) {
    const double current = waveform.mean_power_w();
    if (current <= 0.0) throw degenerate_input_error("scale_mean_power: zero-power waveform");
    const double target_w = std::pow(10.0, target_dbm / 10.0) * 1e-3;
    const double scale = std::sqrt(target_w / current);
    for (auto& s : waveform.samples) s *= scale;
    return scale;
}

void frequency_shift(Waveform& waveform, double offset_ghz) {
    if (offset_ghz == 0.0) return;
    const double step = 2.0 * std::numbers::pi * offset_ghz / waveform.sample_rate_ghz;
    for (std::size_t i = 0; i < waveform.samples.size(); ++i) {
        const double phase = step * static_cast<double>(i);
        waveform.samples[i] *= std::complex<double>(std::cos(phase), std::sin(phase));
    }
}

Waveform build_wdm(std::span<const Waveform> channels, double spacing_ghz) {
    if (channels.empty() || channels.size() % 2 == 0)
        throw config_error("build_wdm: channel count must be odd");
    const std::size_t n = channels[0].samples.size();
    const double rate = channels[0].sample_rate_ghz;
    for (const Waveform& ch : channels) {
        if (ch.samples.size() != n || ch.sample_rate_ghz != rate)
            throw config_error("build_wdm: channels must share length and sample rate");
    }

    Waveform out;
    out.sample_rate_ghz = rate;
    out.samples.assign(n, {0.0, 0.0});
    const double mid = (static_cast<double>(channels.size()) - 1.0) / 2.0;
    for (std::size_t c = 0; c < channels.size(); ++c) {
        const double offset = (static_cast<double>(c) - mid) * spacing_ghz;
        if (offset == 0.0) {
            for (std::size_t i = 0; i < n; ++i) out.samples[i] += channels[c].samples[i];
        } else {
            const double step = 2.0 * std::numbers::pi * offset / rate;
            for (std::size_t i = 0; i < n; ++i) {
                const double phase = step * static_cast<double>(i);
                out.samples[i] += channels[c].samples[i] *
                                  std::complex<double>(std::cos(phase), std::sin(phase));
            }
        }
    }
    return out;
}

Waveform ssfm_span(Waveform field, const LinkConfig& link) {
    link.validate();
    if (field.samples.empty()) throw invalid_input_error("ssfm_span: empty field");
    g_propagation_count.fetch_add(1, std::memory_order_relaxed);

    const std::size_t n = field.samples.size();
    const int steps = link.steps_per_span();
    const double h = link.span_length_km / steps;
    const double beta2_ns2 = link.beta2_ps2_per_km() * 1e-6;
    const double alpha = link.loss_linear_per_km();
    const double gamma = link.gamma_per_w_km;

    // Effective step length referenced to the mid-step power.
    const double h_eff = alpha > 0.0 ? 2.0 * std::sinh(alpha * h / 2.0) / alpha : h;
    const bool linear_identity = beta2_ns2 == 0.0 && alpha == 0.0;
    const bool nonlinear_active = gamma > 0.0;

    std::vector<std::complex<double>> half_op;
    if (!linear_identity) {
        half_op.resize(n);
        const double amp = std::exp(-alpha * h / 4.0);  // field loss over h/2
        for (std::size_t k = 0; k < n; ++k) {
            const double omega = bin_omega(k, n, field.sample_rate_ghz);
            const double phase = 0.5 * beta2_ns2 * omega * omega * (h / 2.0);
            half_op[k] = amp * std::complex<double>(std::cos(phase), std::sin(phase));
        }
    }

    fft::Buffer buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = field.samples[i];

    auto apply_linear = [&](bool full_step) {
        if (linear_identity) return;
        fft::forward(buf);
        if (full_step) {
            for (std::size_t k = 0; k < n; ++k) buf[k] *= half_op[k] * half_op[k];
        } else {
            for (std::size_t k = 0; k < n; ++k) buf[k] *= half_op[k];
        }
        fft::inverse(buf);
    };
    auto apply_nonlinear = [&]() {
        if (!nonlinear_active) return;
        for (std::size_t i = 0; i < n; ++i) {
            const std::complex<double> a = buf[i];
            const double power = a.real() * a.real() + a.imag() * a.imag();
            const double theta = gamma * h_eff * power;
            buf[i] = a * std::complex<double>(std::cos(theta), std::sin(theta));
        }
    };

    apply_linear(false);
    for (int s = 0; s < steps; ++s) {
        apply_nonlinear();
        apply_linear(s + 1 < steps ? true : false);
    }

    check_finite(buf);
    field.samples.assign(buf.data(), buf.data() + n);
    return field;
}

Waveform edfa(Waveform field, double gain_db, double noise_figure_db,
              double center_wavelength_nm, std::uint64_t seed) {
    const double gain = std::pow(10.0, gain_db / 10.0);
    const double amp = std::sqrt(gain);
    for (auto& s : field.samples) s *= amp;

    const bool noise_enabled = std::isfinite(noise_figure_db) && gain > 1.0;
    if (noise_enabled) {
        const double n_sp = std::pow(10.0, noise_figure_db / 10.0) / 2.0;
        const double photon_hz = kSpeedOfLightMPerS / (center_wavelength_nm * 1e-9);
        const double bandwidth_hz = field.sample_rate_ghz * 1e9;
        const double p_ase = (gain - 1.0) * kPlanckJS * photon_hz * n_sp * bandwidth_hz;
        const double sigma = std::sqrt(p_ase / 2.0);
        Rng rng(seed);
        for (auto& s : field.samples) {
            const auto [g1, g2] = rng.next_gaussian_pair();
            s += std::complex<double>(sigma * g1, sigma * g2);
        }
    }
    return field;
}

std::uint64_t span_noise_seed(std::uint64_t master_seed, int span_index) {
    return Rng(master_seed).split(static_cast<std::uint64_t>(span_index)).seed();
}

Waveform propagate_link(Waveform field, const LinkConfig& link, std::uint64_t seed) {
    link.validate();
    for (int span = 0; span < link.num_spans; ++span) {
        field = ssfm_span(std::move(field), link);
        field = edfa(std::move(field), link.span_loss_db(), link.noise_figure_db,
                     link.center_wavelength_nm, span_noise_seed(seed, span));
    }
    return field;
}

std::uint64_t propagation_count() {
    return g_propagation_count.load(std::memory_order_relaxed);
}

SnrEstimate estimate_effective_snr(std::span<const std::complex<double>> received,
                                   std::span<const std::complex<double>> reference) {
    if (received.size() != reference.size() || received.empty())
        throw invalid_input_error("estimate_effective_snr: size mismatch or empty input");

    std::complex<double> cross{0.0, 0.0};
    double ref_power = 0.0;
    for (std::size_t i = 0; i < received.size(); ++i) {
        cross += received[i] * std::conj(reference[i]);
        ref_power += std::norm(reference[i]);
    }
    if (ref_power == 0.0)
        throw degenerate_input_error("estimate_effective_snr: zero-power reference");
    const std::complex<double> scale = cross / ref_power;

    double signal = 0.0, error = 0.0;
    for (std::size_t i = 0; i < received.size(); ++i) {
        const std::complex<double> fitted = scale * reference[i];
        signal += std::norm(fitted);
        error += std::norm(received[i] - fitted);
    }

    SnrEstimate est;
    est.scale = scale;
    est.snr_db = error > 0.0 ? 10.0 * std::log10(signal / error) : 99.0;
    if (est.snr_db > 99.0) est.snr_db = 99.0;  // numerically noiseless sentinel
    return est;
}

RxResult rx_central_channel(const Waveform& field, const WdmConfig& wdm,
                            const LinkConfig& link,
                            const shaping::SymbolSequence& tx_central) {
    wdm.validate();
    link.validate();
    const std::size_t sps = static_cast<std::size_t>(wdm.samples_per_symbol);
    const std::size_t num_symbols = tx_central.symbols.size();
    const std::size_t n = field.samples.size();
    if (n != num_symbols * sps)
        throw config_error("rx_central_channel: waveform length does not match tx symbols");
    const std::size_t guard = static_cast<std::size_t>(wdm.guard_symbols);
    if (2 * guard >= num_symbols)
        throw config_error("rx_central_channel: guards leave no symbols to measure");

    fft::Buffer buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = field.samples[i];
    fft::forward(buf);

    // Exact inverse of the accumulated dispersion, then the matched filter.
    const double beta2_ns2 = link.beta2_ps2_per_km() * 1e-6;
    const double total_km = link.total_length_km();
    const auto matched =
        fir_spectrum(rrc_taps(wdm.samples_per_symbol, wdm.rolloff, wdm.rrc_span_symbols), n);
    for (std::size_t k = 0; k < n; ++k) {
        const double omega = bin_omega(k, n, field.sample_rate_ghz);
        const double phase = -0.5 * beta2_ns2 * omega * omega * total_km;
        buf[k] *= std::complex<double>(std::cos(phase), std::sin(phase)) * std::conj(matched[k]);
    }
    fft::inverse(buf);

    // Best integer sampling phase by correlation against the reference.
    const std::size_t first = guard, last = num_symbols - guard;
    std::size_t best_offset = 0;
    double best_corr = -1.0;
    for (std::size_t tau = 0; tau < sps; ++tau) {
        std::complex<double> corr{0.0, 0.0};
        for (std::size_t k = first; k < last; ++k)
            corr += buf[k * sps + tau] * std::conj(tx_central.symbols[k]);
        if (std::abs(corr) > best_corr) {
            best_corr = std::abs(corr);
            best_offset = tau;
        }
    }

    RxResult result;
    result.sampling_offset = static_cast<int>(best_offset);
    result.recovered_symbols.resize(last - first);
    for (std::size_t k = first; k < last; ++k)
        result.recovered_symbols[k - first] = buf[k * sps + best_offset];

    const auto reference =
        std::span<const std::complex<double>>(tx_central.symbols).subspan(first, last - first);
    const SnrEstimate est = estimate_effective_snr(result.recovered_symbols, reference);
    result.effective_snr_db = est.snr_db;
    result.scale = est.scale;
    return result;
}

} // namespace nlishape::channel
