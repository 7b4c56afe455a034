#include <benchmark/benchmark.h>

#include "rvs/hypgeom.hpp"
#include "rvs/lyapunov.hpp"

using namespace rvs;

namespace {

const double kInvPhi = 0.6180339887498949;

void BM_ContinuedFraction(benchmark::State& st) {
    const Rotation2IET t = Rotation2IET::fromAlpha(0.4142135623730951);
    for (auto _ : st) benchmark::DoNotOptimize(continuedFraction(t, static_cast<std::size_t>(st.range(0))));
}
BENCHMARK(BM_ContinuedFraction)->Arg(15)->Arg(40);

void BM_FirstReturn(benchmark::State& st) {
    const Rotation2IET t = Rotation2IET::fromAlpha(kInvPhi);
    for (auto _ : st) benchmark::DoNotOptimize(firstReturnOracle(t, static_cast<std::size_t>(st.range(0))));
}
BENCHMARK(BM_FirstReturn)->Arg(8)->Arg(20);

void BM_DirectExponent(benchmark::State& st) {
    const auto [A, B] = canonicalRotationPair(1.0, 2.0, 2.5);
    const Rotation2IET t = Rotation2IET::fromAlpha(0.3);
    for (auto _ : st) benchmark::DoNotOptimize(directExponent({A, B}, t, static_cast<std::uint64_t>(st.range(0)), 4));
    st.SetItemsProcessed(st.iterations() * st.range(0) * 4);
}
BENCHMARK(BM_DirectExponent)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_RenormDecision(benchmark::State& st) {
    const auto [A, B] = canonicalRotationPair(1.0, 2.0, 2.5);
    for (auto _ : st) benchmark::DoNotOptimize(renormDecision({A, B}, 0.3));
}
BENCHMARK(BM_RenormDecision);

void BM_RenormBoundedGolden(benchmark::State& st) {
    const CocyclePair p{Matrix2::rotation(1.0), Matrix2::rotation(1.4142135623730951)};
    const CFExpansion cf = expansionFromDigits(std::vector<std::uint64_t>(61, 1), false);
    for (auto _ : st) benchmark::DoNotOptimize(renormDecision(p, cf));
}
BENCHMARK(BM_RenormBoundedGolden);

}  // namespace

BENCHMARK_MAIN();
