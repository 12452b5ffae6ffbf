#pragma once

#include <complex>
#include <cstddef>

namespace nlishape::fft {

/// SIMD-aligned complex buffer usable with the cached in-place transforms
/// below. Plans are created with deterministic heuristics so repeated runs
/// produce bit-identical spectra.
class Buffer {
public:
    Buffer() = default;
    explicit Buffer(std::size_t size);
    Buffer(Buffer&& other) noexcept;
    Buffer& operator=(Buffer&& other) noexcept;
    Buffer(const Buffer&) = delete;
    Buffer& operator=(const Buffer&) = delete;
    ~Buffer();

    std::complex<double>* data() { return data_; }
    const std::complex<double>* data() const { return data_; }
    std::size_t size() const { return size_; }
    std::complex<double>& operator[](std::size_t i) { return data_[i]; }
    const std::complex<double>& operator[](std::size_t i) const { return data_[i]; }

private:
    std::complex<double>* data_ = nullptr;
    std::size_t size_ = 0;
};

/// In-place forward DFT, X_k = sum_n x_n exp(-j 2 pi k n / N). Unscaled.
void forward(Buffer& buf);

/// In-place inverse DFT including the 1/N factor, so inverse(forward(x)) == x
/// up to rounding.
void inverse(Buffer& buf);

} // namespace nlishape::fft
