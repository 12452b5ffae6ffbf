#pragma once

#include "nlishape/shaping.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace nlishape::channel {

/// Fiber span, amplifier and solver parameters. Units are part of the field
/// names; they match the configuration file keys one to one.
struct LinkConfig {
    double span_length_km = 80.0;
    int num_spans = 1;
    double loss_db_per_km = 0.19;
    double dispersion_ps_nm_km = 17.0;
    double gamma_per_w_km = 1.37;
    double noise_figure_db = 6.0;  // -inf disables amplifier noise
    double center_wavelength_nm = 1550.0;
    double step_km = 0.1;

    void validate() const;
    int steps_per_span() const;
    double beta2_ps2_per_km() const;   // -D lambda^2 / (2 pi c)
    double loss_linear_per_km() const;  // power attenuation coefficient
    double span_loss_db() const { return loss_db_per_km * span_length_km; }
    double total_length_km() const { return span_length_km * num_spans; }
    bool amplifier_noise_enabled() const;

    bool operator==(const LinkConfig&) const = default;
};

/// Multiplex and per-channel modulation parameters.
struct WdmConfig {
    int num_channels = 5;  // odd; the central channel is the one analyzed
    double symbol_rate_gbd = 32.0;
    double channel_spacing_ghz = 50.0;
    double rolloff = 0.1;
    int samples_per_symbol = 8;
    double launch_power_dbm = -2.0;
    int symbols_per_channel = 65536;
    int guard_symbols = 512;  // discarded from each end of the recovered block
    int rrc_span_symbols = 128;

    void validate() const;
    double sample_rate_ghz() const { return symbol_rate_gbd * samples_per_symbol; }
    double channel_offset_ghz(int channel) const {
        return (channel - (num_channels - 1) / 2.0) * channel_spacing_ghz;
    }

    bool operator==(const WdmConfig&) const = default;
};

/// Complex baseband field sampled at sample_rate_ghz; |sample|^2 is power
/// in watts.
struct Waveform {
    std::vector<std::complex<double>> samples;
    double sample_rate_ghz = 0.0;

    double mean_power_w() const;
};

struct RxResult {
    std::vector<std::complex<double>> recovered_symbols;  // guards removed
    double effective_snr_db = 0.0;
    std::complex<double> scale{1.0, 0.0};  // least-squares fit of rx onto tx
    int sampling_offset = 0;
};

struct SnrEstimate {
    double snr_db = 0.0;
    std::complex<double> scale{1.0, 0.0};
};

/// Unit-energy root-raised-cosine FIR, truncated to span_symbols symbol
/// periods (span_symbols * sps + 1 taps, zero-phase symmetric).
std::vector<double> rrc_taps(int sps, double rolloff, int span_symbols);

/// Upsample by sps and apply the truncated RRC as a zero-phase circular
/// filter. The waveform keeps the symbols' energy scale; use
/// scale_mean_power for launch power.
Waveform rrc_shape(std::span<const std::complex<double>> symbols, int sps, double rolloff,
                   int span_symbols, double symbol_rate_gbd);

/// Scales the waveform so mean |sample|^2 equals the target power; returns
/// the applied field scale factor.
double scale_mean_power(Waveform& waveform, double target_dbm);

/// In-place spectral shift by offset_ghz.
void frequency_shift(Waveform& waveform, double offset_ghz);

/// Sum of the channels, each shifted to (k - (K-1)/2) * spacing; the central
/// channel stays at baseband.
Waveform build_wdm(std::span<const Waveform> channels, double spacing_ghz);

/// One span of symmetric split-step propagation (dispersion + loss in the
/// frequency domain, Kerr phase rotation in the time domain).
Waveform ssfm_span(Waveform field, const LinkConfig& link);

/// Flat-gain amplifier with additive circular Gaussian ASE across the full
/// simulation bandwidth. spontaneous emission factor n_sp = NF_linear / 2.
Waveform edfa(Waveform field, double gain_db, double noise_figure_db,
              double center_wavelength_nm, std::uint64_t seed);

/// num_spans repetitions of ssfm_span followed by a loss-compensating edfa;
/// per-span noise seeds derive from the master seed.
Waveform propagate_link(Waveform field, const LinkConfig& link, std::uint64_t seed);

std::uint64_t span_noise_seed(std::uint64_t master_seed, int span_index);

/// Least-squares effective SNR: scale = sum(y x*) / sum(|x|^2),
/// snr = sum(|scale x|^2) / sum(|y - scale x|^2), capped at 99 dB.
SnrEstimate estimate_effective_snr(std::span<const std::complex<double>> received,
                                   std::span<const std::complex<double>> reference);

/// Ideal receiver for the central channel: exact chromatic dispersion
/// compensation, matched RRC filter, decimation at the best integer sampling
/// phase, guard removal, then the least-squares SNR estimate.
RxResult rx_central_channel(const Waveform& field, const WdmConfig& wdm,
                            const LinkConfig& link,
                            const shaping::SymbolSequence& tx_central);

/// Total ssfm_span invocations in this process (instrumentation; lets tests
/// assert that analysis passes never trigger propagation).
std::uint64_t propagation_count();

} // namespace nlishape::channel
