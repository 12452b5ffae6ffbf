#include "nlishape/metrics.hpp"

#include "nlishape/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nlishape::metrics {

std::vector<double> symbol_energies(std::span<const std::complex<double>> symbols) {
    if (symbols.empty()) throw invalid_input_error("symbol_energies: empty input");
    std::vector<double> energies(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const double re = symbols[i].real();
        const double im = symbols[i].imag();
        energies[i] = re * re + im * im;
    }
    return energies;
}

long truncation_length(double lambda, double epsilon) {
    if (lambda < 0.0 || lambda >= 1.0)
        throw invalid_input_error("truncation_length: lambda must be in [0, 1)");
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw invalid_input_error("truncation_length: epsilon must be in (0, 1]");
    if (lambda == 0.0 || epsilon == 1.0) return 0;
    return static_cast<long>(std::ceil(std::log(epsilon) / std::log(lambda)));
}

WeightedEnergySeries weighted_energy(std::span<const double> energies, double lambda,
                                     double epsilon) {
    return weighted_energy_truncated(energies, lambda, truncation_length(lambda, epsilon));
}

WeightedEnergySeries weighted_energy_truncated(std::span<const double> energies,
                                               double lambda, long truncation) {
    if (lambda < 0.0 || lambda >= 1.0)
        throw invalid_input_error("weighted_energy: lambda must be in [0, 1)");
    if (truncation < 0) throw invalid_input_error("weighted_energy: negative truncation");
    if (energies.empty()) throw invalid_input_error("weighted_energy: empty input");

    const std::size_t m = energies.size();
    const std::size_t L = static_cast<std::size_t>(truncation);
    if (m < 2 * L + 1)
        throw insufficient_length_error(
            "weighted_energy: series shorter than 2L+1 for the requested truncation");

    // One-sided geometric sums over the whole series...
    std::vector<double> fwd(m), bwd(m);
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        acc = lambda * acc + energies[i];
        fwd[i] = acc;
    }
    acc = 0.0;
    for (std::size_t i = m; i-- > 0;) {
        acc = lambda * acc + energies[i];
        bwd[i] = acc;
    }

    // ...with the mass beyond L subtracted, so each value equals the direct
    // sum over |l| <= L. lambda^(L+1) == 0 when lambda == 0.
    const double tail = std::pow(lambda, static_cast<double>(L + 1));
    WeightedEnergySeries series;
    series.lambda = lambda;
    series.truncation = truncation;
    series.values.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        double g = fwd[i] + bwd[i] - energies[i];
        if (tail != 0.0) {
            if (i >= L + 1) g -= tail * fwd[i - L - 1];
            if (i + L + 1 < m) g -= tail * bwd[i + L + 1];
        }
        series.values[i] = g;
    }
    series.interior_begin = L;
    series.interior_end = m - L;
    return series;
}

namespace {

MetricResult dispersion_index(std::span<const double> windowed, MetricKind kind,
                              double parameter) {
    RunningStat stat;
    for (double v : windowed) stat.push(v);
    if (stat.mean() == 0.0)
        throw degenerate_input_error("dispersion index: zero mean energy");
    return MetricResult{stat.variance() / stat.mean(), kind, parameter, stat.count()};
}

} // namespace

MetricResult eedi(std::span<const std::complex<double>> symbols, double lambda,
                  double epsilon) {
    if (lambda == 1.0) {
        if (symbols.size() < 2)
            throw insufficient_length_error("eedi: need at least 2 symbols");
        return MetricResult{0.0, MetricKind::eedi, lambda, symbols.size()};
    }
    return eedi_from_energies(symbol_energies(symbols), lambda, epsilon);
}

MetricResult eedi_from_energies(std::span<const double> energies, double lambda,
                                double epsilon) {
    if (lambda == 1.0) {
        if (energies.size() < 2)
            throw insufficient_length_error("eedi: need at least 2 samples");
        return MetricResult{0.0, MetricKind::eedi, lambda, energies.size()};
    }
    const WeightedEnergySeries series = weighted_energy(energies, lambda, epsilon);
    const auto interior = series.interior();
    if (interior.size() < 2)
        throw insufficient_length_error("eedi: interior range has fewer than 2 samples");
    return dispersion_index(interior, MetricKind::eedi, lambda);
}

MetricResult edi(std::span<const std::complex<double>> symbols, int window) {
    return edi_from_energies(symbol_energies(symbols), window);
}

MetricResult edi_from_energies(std::span<const double> energies, int window) {
    if (window < 1 || window % 2 == 0)
        throw invalid_input_error("edi: window must be an odd positive integer");
    const std::size_t m = energies.size();
    if (m < static_cast<std::size_t>(window) + 1)
        throw insufficient_length_error("edi: series must be longer than the window");

    const std::size_t half = static_cast<std::size_t>(window / 2);
    // Long-double prefix sums keep cancellation well below the statistic's
    // own Monte Carlo noise for series up to ~1e7 samples.
    std::vector<long double> prefix(m + 1, 0.0L);
    for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] + energies[i];

    RunningStat stat;
    for (std::size_t i = half; i + half < m; ++i) {
        stat.push(static_cast<double>(prefix[i + half + 1] - prefix[i - half]));
    }
    if (stat.mean() == 0.0) throw degenerate_input_error("edi: zero mean energy");
    return MetricResult{stat.variance() / stat.mean(), MetricKind::edi,
                        static_cast<double>(window), stat.count()};
}

MetricResult kurtosis(std::span<const std::complex<double>> symbols) {
    if (symbols.size() < 2) throw insufficient_length_error("kurtosis: need at least 2 symbols");
    double sum_e = 0.0, sum_e2 = 0.0;
    for (const auto& s : symbols) {
        const double e = s.real() * s.real() + s.imag() * s.imag();
        sum_e += e;
        sum_e2 += e * e;
    }
    const double n = static_cast<double>(symbols.size());
    const double mean_e = sum_e / n;
    if (mean_e == 0.0) throw degenerate_input_error("kurtosis: zero mean energy");
    const double mean_e2 = sum_e2 / n;
    return MetricResult{mean_e2 / (mean_e * mean_e), MetricKind::kurtosis, 0.0,
                        symbols.size()};
}

long effective_window_count(double lambda, double threshold) {
    if (lambda < 0.0 || lambda >= 1.0)
        throw invalid_input_error("effective_window_count: lambda must be in [0, 1)");
    if (!(threshold > 0.0) || threshold > 1.0)
        throw invalid_input_error("effective_window_count: threshold must be in (0, 1]");
    if (lambda == 0.0) return 1;
    const long one_sided =
        static_cast<long>(std::floor(std::log(threshold) / std::log(lambda)));
    return 2 * std::max(one_sided, 0L) + 1;
}

} // namespace nlishape::metrics
