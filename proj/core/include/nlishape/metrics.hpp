#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nlishape::metrics {

enum class MetricKind { eedi, edi, kurtosis };

struct MetricResult {
    double value = 0.0;
    MetricKind kind = MetricKind::eedi;
    double parameter = 0.0;        // forgetting factor for eedi, window for edi
    std::size_t sample_count = 0;  // samples the statistic was taken over
};

/// Exponentially-weighted energy series G_i = sum_l lambda^|l| e_{i+l},
/// |l| <= truncation. Only the interior indices have full two-sided support.
struct WeightedEnergySeries {
    std::vector<double> values;
    double lambda = 0.0;
    long truncation = 0;
    std::size_t interior_begin = 0;
    std::size_t interior_end = 0;  // one past the last full-support index

    std::span<const double> interior() const {
        return std::span<const double>(values).subspan(interior_begin,
                                                       interior_end - interior_begin);
    }
};

/// Numerically stable running mean/variance accumulator (Welford); the
/// variance is the unbiased (n-1) sample variance.
class RunningStat {
public:
    void push(double x) {
        ++count_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
    }
    std::size_t count() const { return count_; }
    double mean() const { return mean_; }
    double variance() const {
        return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
    }

private:
    std::size_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Per-symbol energies |x_i|^2.
std::vector<double> symbol_energies(std::span<const std::complex<double>> symbols);

/// Smallest L with lambda^L <= epsilon (0 for lambda == 0).
long truncation_length(double lambda, double epsilon);

/// Weighted energy series with truncation L = ceil(ln eps / ln lambda),
/// computed by forward/backward recursions with exact tail subtraction, so
/// it matches the direct truncated sum to rounding error.
WeightedEnergySeries weighted_energy(std::span<const double> energies, double lambda,
                                     double epsilon = 1e-6);

/// Same, with an explicit truncation length.
WeightedEnergySeries weighted_energy_truncated(std::span<const double> energies,
                                               double lambda, long truncation);

/// Exponentially-weighted energy dispersion index Var(G)/Mean(G) over the
/// full-support interior. lambda == 1 weights every energy equally, so the
/// series is constant and the result is exactly zero.
MetricResult eedi(std::span<const std::complex<double>> symbols, double lambda,
                  double epsilon = 1e-6);
MetricResult eedi_from_energies(std::span<const double> energies, double lambda,
                                double epsilon = 1e-6);

/// Finite-window energy dispersion index over a centered sliding window of
/// odd length `window`.
MetricResult edi(std::span<const std::complex<double>> symbols, int window);
MetricResult edi_from_energies(std::span<const double> energies, int window);

/// Standardized fourth moment mean(|x|^4) / mean(|x|^2)^2.
MetricResult kurtosis(std::span<const std::complex<double>> symbols);

/// Count of integer offsets l with lambda^|l| >= threshold.
long effective_window_count(double lambda, double threshold);

} // namespace nlishape::metrics
