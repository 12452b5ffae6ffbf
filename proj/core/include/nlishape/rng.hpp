#pragma once

#include <cstdint>
#include <utility>

namespace nlishape {

/// Counter-based 64-bit pseudorandom generator (splitmix64 output function
/// over an incrementing counter). Cheap to fork into statistically
/// independent child streams, which keeps every experiment reproducible
/// from a single master seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        return mix(seed_ + kGamma * ++counter_);
    }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Single fair bit (MSB-first out of buffered 64-bit draws).
    bool next_bit() {
        if (bit_count_ == 0) {
            bit_buffer_ = next_u64();
            bit_count_ = 64;
        }
        const bool b = (bit_buffer_ >> 63) != 0;
        bit_buffer_ <<= 1;
        --bit_count_;
        return b;
    }

    /// ±1 with equal probability.
    int next_sign() { return next_bit() ? 1 : -1; }

    /// Pair of independent N(0,1) samples (Box-Muller; fully specified
    /// arithmetic so streams are bit-reproducible across platforms).
    std::pair<double, double> next_gaussian_pair();

    /// Independent child stream; children with distinct labels never
    /// collide with each other or with the parent's output sequence.
    Rng split(std::uint64_t label) const {
        return Rng(mix(seed_ ^ mix(label + kLeafSalt)));
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t kLeafSalt = 0xD1B54A32D192ED03ull;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_ = 0;
    std::uint64_t counter_ = 0;
    std::uint64_t bit_buffer_ = 0;
    int bit_count_ = 0;
};

} // namespace nlishape
