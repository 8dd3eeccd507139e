#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pes/capacity.hpp"
#include "pes/channel.hpp"
#include "pes/fec.hpp"
#include "pes/model.hpp"
#include "pes/rng.hpp"
#include "pes/shaping.hpp"
#include "pes/waveform.hpp"

using namespace pes;

namespace {

const ChannelParams kParams{0.05};

void bm_density(benchmark::State& state)
{
    double y = 0.9;
    for (auto _ : state) {
        benchmark::DoNotOptimize(channel_density(y, Eigenvalue{1.0}, kParams));
        y = y < 2.0 ? y + 1e-4 : 0.5;
    }
}
BENCHMARK(bm_density);

void bm_channel_sample(benchmark::State& state)
{
    std::mt19937_64 rng = stream_rng(1, 0, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(channel_sample(Eigenvalue{1.0}, kParams, rng));
}
BENCHMARK(bm_channel_sample);

void bm_mutual_information(benchmark::State& state)
{
    const Constellation c = linear_constellation(static_cast<std::size_t>(state.range(0)),
                                                 Eigenvalue{2.0});
    const InputDistribution p = uniform_distribution(c.size());
    for (auto _ : state) {
        const DensityTable table(c, kParams);
        benchmark::DoNotOptimize(table.mutual_information(p));
    }
}
BENCHMARK(bm_mutual_information)->Arg(4)->Arg(8);

void bm_capacity_solver(benchmark::State& state)
{
    const Constellation c = linear_constellation(4, Eigenvalue{2.0});
    const PulseTiming timing = make_pulse_timing(c, 0.005);
    OptimizeOptions opt;
    opt.tol = 1e-6;
    for (auto _ : state)
        benchmark::DoNotOptimize(optimize_distribution(c, timing, kParams, opt));
}
BENCHMARK(bm_capacity_solver)->Unit(benchmark::kMillisecond);

void bm_ccdm_round_trip(benchmark::State& state)
{
    const Composition comp = quantize_composition(
        InputDistribution{{0.4, 0.3, 0.2, 0.1}}, static_cast<std::size_t>(state.range(0)));
    const std::size_t k = ccdm_input_bits(comp);
    std::vector<std::uint8_t> bits(k);
    std::mt19937_64 rng(7);
    for (auto& b : bits)
        b = static_cast<std::uint8_t>(rng() & 1u);
    for (auto _ : state) {
        const std::vector<std::uint32_t> symbols = ccdm_encode(bits, comp);
        benchmark::DoNotOptimize(ccdm_decode(symbols, comp));
    }
}
BENCHMARK(bm_ccdm_round_trip)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

void bm_bp_decode(benchmark::State& state)
{
    const ParityCheckMatrix code = load_code_file(BENCH_DATA_DIR "/ldpc_n96_r34.alist");
    std::vector<double> llrs(code.n, 8.0);
    llrs[3] = -8.0;
    llrs[40] = -8.0;
    llrs[77] = -8.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(bp_decode(llrs, code, 50));
}
BENCHMARK(bm_bp_decode)->Unit(benchmark::kMicrosecond);

void bm_ssfm_span(benchmark::State& state)
{
    const WaveformGrid tx = soliton_waveform(Eigenvalue{1.0}, 20.0, 0.01, 1e-6);
    FiberParams fiber;
    fiber.length_km = 80.0;
    const NormalizationMap map = make_normalization(fiber);
    std::mt19937_64 rng = stream_rng(2, 0, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(ssfm_propagate(tx, fiber, map, &rng, 1.0, 10.0));
}
BENCHMARK(bm_ssfm_span)->Unit(benchmark::kMillisecond);

void bm_nft_eigenvalue(benchmark::State& state)
{
    const WaveformGrid sol = soliton_waveform(Eigenvalue{1.0}, 20.0, 0.01, 1e-6);
    for (auto _ : state)
        benchmark::DoNotOptimize(forward_nft_eigenvalue(sol, 2.0));
}
BENCHMARK(bm_nft_eigenvalue)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
