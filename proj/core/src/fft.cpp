#include "nlishape/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <new>
#include <utility>

namespace nlishape::fft {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

// Plans are created once per size on an aligned scratch buffer and reused
// for every aligned buffer of that size. FFTW_ESTIMATE keeps plan selection
// deterministic across processes, which the byte-identical-output contract
// relies on.
PlanPair plans_for(std::size_t n) {
    static std::map<std::size_t, PlanPair> cache;
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    fftw_complex* scratch = fftw_alloc_complex(n);
    if (!scratch) throw std::bad_alloc();
    PlanPair p;
    p.fwd = fftw_plan_dft_1d(static_cast<int>(n), scratch, scratch, FFTW_FORWARD, FFTW_ESTIMATE);
    p.inv = fftw_plan_dft_1d(static_cast<int>(n), scratch, scratch, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(scratch);
    cache.emplace(n, p);
    return p;
}

} // namespace

Buffer::Buffer(std::size_t size) : size_(size) {
    if (size_ == 0) return;
    data_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(size_));
    if (!data_) throw std::bad_alloc();
}

Buffer::Buffer(Buffer&& other) noexcept : data_(other.data_), size_(other.size_) {
    other.data_ = nullptr;
    other.size_ = 0;
}

Buffer& Buffer::operator=(Buffer&& other) noexcept {
    if (this != &other) {
        if (data_) fftw_free(reinterpret_cast<fftw_complex*>(data_));
        data_ = std::exchange(other.data_, nullptr);
        size_ = std::exchange(other.size_, 0);
    }
    return *this;
}

Buffer::~Buffer() {
    if (data_) fftw_free(reinterpret_cast<fftw_complex*>(data_));
}

void forward(Buffer& buf) {
    if (buf.size() == 0) return;
    PlanPair p = plans_for(buf.size());
    fftw_complex* ptr = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(p.fwd, ptr, ptr);
}

void inverse(Buffer& buf) {
    if (buf.size() == 0) return;
    PlanPair p = plans_for(buf.size());
    fftw_complex* ptr = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(p.inv, ptr, ptr);
    const double scale = 1.0 / static_cast<double>(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= scale;
}

} // namespace nlishape::fft
