#include "nlishape/shaping.hpp"

#include "nlishape/errors.hpp"
#include "nlishape/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace nlishape::shaping {

void AmplitudeAlphabet::validate() const {
    if (levels.empty()) throw config_error("alphabet.levels: must not be empty");
    if (levels.size() != probabilities.size())
        throw config_error("alphabet.probabilities: length must match levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] > 0.0))
            throw config_error("alphabet.levels: entries must be strictly positive");
        if (i > 0 && !(levels[i] > levels[i - 1]))
            throw config_error("alphabet.levels: entries must be strictly increasing");
        if (probabilities[i] < 0.0)
            throw config_error("alphabet.probabilities: entries must be non-negative");
    }
    const double total = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12)
        throw config_error("alphabet.probabilities: must sum to 1 within 1e-12");
}

double AmplitudeAlphabet::entropy_bits() const {
    double h = 0.0;
    for (double p : probabilities) {
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

std::vector<double> AmplitudeBlock::values(const AmplitudeAlphabet& alphabet) const {
    std::vector<double> out(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) out[i] = alphabet.levels[indices[i]];
    return out;
}

Composition compute_composition(const AmplitudeAlphabet& alphabet, int n) {
    alphabet.validate();
    if (n < 1) throw invalid_input_error("compute_composition: n must be >= 1");

    const std::size_t m = alphabet.size();
    std::vector<int> counts(m);
    std::vector<double> remainders(m);
    int assigned = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double target = static_cast<double>(n) * alphabet.probabilities[i];
        counts[i] = static_cast<int>(std::floor(target));
        remainders[i] = target - std::floor(target);
        assigned += counts[i];
    }

    // Hand out the leftover seats to the largest remainders, lowest index
    // winning ties.
    int leftover = n - assigned;
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return remainders[a] > remainders[b];
    });
    for (int k = 0; k < leftover; ++k) counts[order[static_cast<std::size_t>(k) % m]] += 1;

    return Composition{std::move(counts), n};
}

namespace {

void check_composition(const Composition& composition) {
    if (composition.blocklength < 1)
        throw invalid_input_error("composition: blocklength must be >= 1");
    long long total = 0;
    for (int c : composition.counts) {
        if (c < 0) throw invalid_input_error("composition: counts must be non-negative");
        total += c;
    }
    if (total != composition.blocklength)
        throw invalid_input_error("composition: counts must sum to the blocklength");
}

} // namespace

BigInt ccdm_num_sequences(const Composition& composition) {
    check_composition(composition);
    // Incremental multinomial: prod over positions of remaining/chosen.
    BigInt total = 1;
    std::vector<int> counts = composition.counts;
    int remaining = composition.blocklength;
    for (std::size_t level = 0; level < counts.size(); ++level) {
        for (int k = 0; k < counts[level]; ++k) {
            total = total * remaining / (k + 1);
            --remaining;
        }
    }
    return total;
}

std::size_t ccdm_bits_per_block(const Composition& composition) {
    const BigInt count = ccdm_num_sequences(composition);
    return boost::multiprecision::msb(count);  // floor(log2(count)); count >= 1
}

AmplitudeBlock ccdm_encode(const Bits& bits, const Composition& composition) {
    const std::size_t k = ccdm_bits_per_block(composition);
    if (bits.size() != k) {
        std::ostringstream msg;
        msg << "ccdm_encode: expected " << k << " bits, got " << bits.size();
        throw invalid_input_error(msg.str());
    }

    BigInt index = 0;
    if (!bits.empty())
        boost::multiprecision::import_bits(index, bits.begin(), bits.end(), 1, true);

    const int n = composition.blocklength;
    std::vector<int> counts = composition.counts;
    BigInt total = ccdm_num_sequences(composition);

    AmplitudeBlock block;
    block.indices.resize(static_cast<std::size_t>(n));
    for (int pos = 0; pos < n; ++pos) {
        const int remaining = n - pos;
        bool chosen = false;
        for (std::size_t level = 0; level < counts.size(); ++level) {
            if (counts[level] == 0) continue;
            // Arrangements starting with this level; exact division.
            BigInt with_level = total * counts[level] / remaining;
            if (index < with_level) {
                block.indices[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(level);
                total = std::move(with_level);
                --counts[level];
                chosen = true;
                break;
            }
            index -= with_level;
        }
        if (!chosen) throw invalid_input_error("ccdm_encode: index out of range");
    }
    return block;
}

Bits ccdm_decode(const AmplitudeBlock& block, const Composition& composition) {
    check_composition(composition);
    if (block.indices.size() != static_cast<std::size_t>(composition.blocklength))
        throw invalid_input_error("ccdm_decode: block length does not match the composition");

    std::vector<int> seen(composition.counts.size(), 0);
    for (std::uint8_t idx : block.indices) {
        if (idx >= composition.counts.size())
            throw invalid_input_error("ccdm_decode: level index outside the alphabet");
        seen[idx] += 1;
    }
    if (seen != composition.counts)
        throw invalid_input_error("ccdm_decode: block multiset does not match the composition");

    const int n = composition.blocklength;
    std::vector<int> counts = composition.counts;
    BigInt total = ccdm_num_sequences(composition);
    const std::size_t k = boost::multiprecision::msb(total);

    BigInt rank = 0;
    for (int pos = 0; pos < n; ++pos) {
        const int remaining = n - pos;
        const std::uint8_t actual = block.indices[static_cast<std::size_t>(pos)];
        for (std::size_t level = 0; level < static_cast<std::size_t>(actual); ++level) {
            if (counts[level] == 0) continue;
            rank += total * counts[level] / remaining;
        }
        total = total * counts[actual] / remaining;
        --counts[actual];
    }

    if (rank >= (BigInt(1) << k))
        throw out_of_range_error("ccdm_decode: block rank exceeds the bit capacity");

    Bits bits(k, 0);
    for (std::size_t b = 0; b < k; ++b) {
        if (boost::multiprecision::bit_test(rank, static_cast<unsigned>(k - 1 - b))) bits[b] = 1;
    }
    return bits;
}

SymbolSequence generate_shaped_symbols(const AmplitudeAlphabet& alphabet, int n,
                                       int num_blocks, std::uint64_t seed) {
    alphabet.validate();
    if (num_blocks < 1) throw invalid_input_error("generate_shaped_symbols: num_blocks must be >= 1");

    const Composition composition = compute_composition(alphabet, n);
    const std::size_t k = ccdm_bits_per_block(composition);
    const std::size_t total = static_cast<std::size_t>(n) * static_cast<std::size_t>(num_blocks);

    const Rng root(seed);
    Rng bit_rng[2] = {root.split(0), root.split(1)};
    Rng sign_rng[2] = {root.split(2), root.split(3)};

    std::vector<double> amplitude[2];
    for (int dim = 0; dim < 2; ++dim) {
        amplitude[dim].reserve(total);
        for (int b = 0; b < num_blocks; ++b) {
            Bits bits(k);
            for (std::size_t i = 0; i < k; ++i) bits[i] = bit_rng[dim].next_bit() ? 1 : 0;
            const AmplitudeBlock block = ccdm_encode(bits, composition);
            for (std::uint8_t idx : block.indices) amplitude[dim].push_back(alphabet.levels[idx]);
        }
    }

    SymbolSequence seq;
    seq.blocklength = n;
    seq.seed = seed;
    seq.symbols.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        const double re = sign_rng[0].next_sign() * amplitude[0][i];
        const double im = sign_rng[1].next_sign() * amplitude[1][i];
        seq.symbols[i] = {re, im};
    }
    return seq;
}

} // namespace nlishape::shaping
