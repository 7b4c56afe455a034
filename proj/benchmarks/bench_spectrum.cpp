#include <benchmark/benchmark.h>

#include "rvs/hypgeom.hpp"
#include "rvs/spectrum.hpp"

using namespace rvs;

namespace {

Representation eeGeneric() {
    const auto [A, B] = canonicalRotationPair(1.0, 2.0, 2.5);
    return makeRepresentation(A, B);
}

void BM_SlopeExpansion(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(slopeExpansion(0.5, 61));
}
BENCHMARK(BM_SlopeExpansion);

void BM_EvaluateSlope(benchmark::State& st) {
    const Representation rep = eeGeneric();
    ScanOptions opt;
    opt.computeChi = st.range(0) != 0;
    for (auto _ : st) benchmark::DoNotOptimize(evaluateSlope(rep, 0.3, {}, opt));
}
BENCHMARK(BM_EvaluateSlope)->Arg(0)->Arg(1);

void BM_ScanGrid(benchmark::State& st) {
    const Representation rep = eeGeneric();
    ScanOptions opt;
    opt.computeChi = false;
    for (auto _ : st) benchmark::DoNotOptimize(scanGrid(rep, 0.05, 0.75, static_cast<std::size_t>(st.range(0)), {}, opt));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_ScanGrid)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Refine(benchmark::State& st) {
    const Representation rep = eeGeneric();
    ScanOptions opt;
    opt.computeChi = false;
    for (auto _ : st) benchmark::DoNotOptimize(refineSpectrum(rep, 0.05, 0.75, static_cast<int>(st.range(0)), {}, opt));
}
BENCHMARK(BM_Refine)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_MCG(benchmark::State& st) {
    const Representation rep = eeGeneric();
    for (auto _ : st) benchmark::DoNotOptimize(mcgTrajectory(rep, 0.3819660112501051, static_cast<std::size_t>(st.range(0))));
}
BENCHMARK(BM_MCG)->Arg(20)->Arg(60);

}  // namespace

BENCHMARK_MAIN();
