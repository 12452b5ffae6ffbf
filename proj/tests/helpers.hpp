#pragma once

#include "nlishape/fft.hpp"
#include "nlishape/rng.hpp"
#include "nlishape/shaping.hpp"

#include <complex>
#include <span>
#include <vector>

namespace testutil {

inline nlishape::shaping::AmplitudeAlphabet shaped64_alphabet() {
    return {{1.0, 3.0, 5.0, 7.0}, {0.4, 0.3, 0.2, 0.1}};
}

/// Independent i.i.d. shaped symbol source (inverse-CDF sampling straight
/// from the generator, no matcher involved) for Monte Carlo oracles.
inline std::vector<std::complex<double>> iid_shaped_symbols(std::size_t count,
                                                            std::uint64_t seed) {
    const auto alphabet = shaped64_alphabet();
    nlishape::Rng rng(seed);
    auto draw_amplitude = [&]() {
        const double u = rng.next_double();
        double cumulative = 0.0;
        for (std::size_t i = 0; i < alphabet.levels.size(); ++i) {
            cumulative += alphabet.probabilities[i];
            if (u < cumulative) return alphabet.levels[i];
        }
        return alphabet.levels.back();
    };
    std::vector<std::complex<double>> symbols(count);
    for (auto& s : symbols) {
        const double re = rng.next_sign() * draw_amplitude();
        const double im = rng.next_sign() * draw_amplitude();
        s = {re, im};
    }
    return symbols;
}

/// Direct truncated double-loop evaluation of the weighted energy sum.
inline double direct_weighted_sum(std::span<const double> energies, double lambda, long L,
                                  std::size_t i) {
    double acc = energies[i];
    double weight = 1.0;
    for (long l = 1; l <= L; ++l) {
        weight *= lambda;
        acc += weight * (energies[i - static_cast<std::size_t>(l)] +
                         energies[i + static_cast<std::size_t>(l)]);
    }
    return acc;
}

/// Brute-force full-support sliding window sums.
inline std::vector<double> sliding_window_sums(std::span<const double> energies, int window) {
    const std::size_t half = static_cast<std::size_t>(window / 2);
    std::vector<double> sums;
    for (std::size_t i = half; i + half < energies.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = i - half; j <= i + half; ++j) acc += energies[j];
        sums.push_back(acc);
    }
    return sums;
}

/// All count vectors of the given length summing to n.
inline std::vector<std::vector<int>> enumerate_count_vectors(std::size_t levels, int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> current(levels, 0);
    auto recurse = [&](auto&& self, std::size_t idx, int remaining) -> void {
        if (idx + 1 == levels) {
            current[idx] = remaining;
            out.push_back(current);
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            current[idx] = c;
            self(self, idx + 1, remaining - c);
        }
    };
    recurse(recurse, 0, n);
    return out;
}

/// Zero-phase circular FIR filter, the same construction the transmitter
/// uses, reimplemented test-side as the matched-filter oracle.
inline std::vector<std::complex<double>> circular_filter(
    std::span<const std::complex<double>> samples, std::span<const double> taps) {
    const std::size_t n = samples.size();
    const std::size_t center = (taps.size() - 1) / 2;
    nlishape::fft::Buffer signal(n), filter(n);
    for (std::size_t i = 0; i < n; ++i) {
        signal[i] = samples[i];
        filter[i] = 0.0;
    }
    filter[0] = taps[center];
    for (std::size_t o = 1; o <= center; ++o) {
        filter[o] = taps[center + o];
        filter[n - o] = taps[center - o];
    }
    nlishape::fft::forward(signal);
    nlishape::fft::forward(filter);
    for (std::size_t i = 0; i < n; ++i) signal[i] *= std::conj(filter[i]);
    nlishape::fft::inverse(signal);
    return {signal.data(), signal.data() + n};
}

} // namespace testutil
