#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstdint>
#include <vector>

namespace nlishape::shaping {

using BigInt = boost::multiprecision::cpp_int;

/// Bit string, one 0/1 entry per bit, most significant bit first.
using Bits = std::vector<std::uint8_t>;

/// Shaped amplitude levels with their target probabilities.
struct AmplitudeAlphabet {
    std::vector<double> levels;         // strictly increasing, strictly positive
    std::vector<double> probabilities;  // non-negative, sums to 1

    std::size_t size() const { return levels.size(); }

    /// Throws config_error when the invariants do not hold.
    void validate() const;

    /// Entropy of the level distribution in bits per amplitude.
    double entropy_bits() const;
};

/// Exact per-level amplitude counts for one matcher block.
struct Composition {
    std::vector<int> counts;  // one per alphabet level, sums to blocklength
    int blocklength = 0;
};

/// One constant-composition block, stored as alphabet level indices.
struct AmplitudeBlock {
    std::vector<std::uint8_t> indices;

    std::vector<double> values(const AmplitudeAlphabet& alphabet) const;
};

/// Complex baseband symbol stream plus the generation parameters needed to
/// reproduce it.
struct SymbolSequence {
    std::vector<std::complex<double>> symbols;
    int blocklength = 0;
    std::uint64_t seed = 0;
};

/// Integer counts closest to n * probabilities, largest-remainder
/// apportionment with ties broken toward the lowest index.
Composition compute_composition(const AmplitudeAlphabet& alphabet, int n);

/// Number of distinct arrangements of the block multiset,
/// n! / prod(counts_i!), computed exactly.
BigInt ccdm_num_sequences(const Composition& composition);

/// Bits carried by one block: floor(log2(ccdm_num_sequences)).
std::size_t ccdm_bits_per_block(const Composition& composition);

/// Maps a bit string (interpreted as an integer) to the multiset permutation
/// with that lexicographic rank, levels ordered as in the alphabet.
AmplitudeBlock ccdm_encode(const Bits& bits, const Composition& composition);

/// Exact inverse of ccdm_encode: lexicographic rank of the block, emitted as
/// a fixed-width bit string.
Bits ccdm_decode(const AmplitudeBlock& block, const Composition& composition);

/// num_blocks constant-composition blocks per quadrature, encoded from
/// seeded pseudorandom bits, with i.i.d. uniform signs per dimension.
/// Deterministic in (alphabet, n, num_blocks, seed).
SymbolSequence generate_shaped_symbols(const AmplitudeAlphabet& alphabet, int n,
                                       int num_blocks, std::uint64_t seed);

} // namespace nlishape::shaping
