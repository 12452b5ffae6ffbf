#include <benchmark/benchmark.h>

#include "nlishape/rng.hpp"
#include "nlishape/shaping.hpp"

using namespace nlishape;

namespace {

shaping::AmplitudeAlphabet alphabet() {
    return {{1.0, 3.0, 5.0, 7.0}, {0.4, 0.3, 0.2, 0.1}};
}

shaping::Bits random_bits(std::size_t k, std::uint64_t seed) {
    Rng rng(seed);
    shaping::Bits bits(k);
    for (auto& b : bits) b = rng.next_bit() ? 1 : 0;
    return bits;
}

} // namespace

static void CcdmEncode(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto comp = shaping::compute_composition(alphabet(), n);
    const auto bits = random_bits(shaping::ccdm_bits_per_block(comp), 1);
    for (auto _ : state) {
        auto block = shaping::ccdm_encode(bits, comp);
        benchmark::DoNotOptimize(block);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(CcdmEncode)->Arg(100)->Arg(1000)->Arg(10000);

static void CcdmRoundtrip(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto comp = shaping::compute_composition(alphabet(), n);
    const auto bits = random_bits(shaping::ccdm_bits_per_block(comp), 2);
    for (auto _ : state) {
        auto decoded = shaping::ccdm_decode(shaping::ccdm_encode(bits, comp), comp);
        benchmark::DoNotOptimize(decoded);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(CcdmRoundtrip)->Arg(100)->Arg(1000);

static void ShapedSymbolGeneration(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int blocks = 16384 / n;
    for (auto _ : state) {
        auto seq = shaping::generate_shaped_symbols(alphabet(), n, blocks, 7);
        benchmark::DoNotOptimize(seq);
    }
    state.SetItemsProcessed(state.iterations() * n * blocks);
}
BENCHMARK(ShapedSymbolGeneration)->Arg(64)->Arg(1024);

BENCHMARK_MAIN();
