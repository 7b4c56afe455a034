#include <benchmark/benchmark.h>

#include <random>

#include "rvs/cocycle.hpp"
#include "rvs/hypgeom.hpp"

using namespace rvs;

namespace {

Matrix2 kak(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ang(0.0, 6.283185307179586), lam(1.0, 3.0);
    return Matrix2::rotation(ang(rng)) * Matrix2::diagonal(lam(rng)) * Matrix2::rotation(ang(rng));
}

void BM_Multiply(benchmark::State& st) {
    std::mt19937_64 rng(1);
    Matrix2 m = kak(rng);
    const Matrix2 n = kak(rng);
    for (auto _ : st) {
        m = mul(m, n);
        if (m.maxAbs() > 1e100) m = n;
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(BM_Multiply);

void BM_Classify(benchmark::State& st) {
    std::mt19937_64 rng(2);
    std::vector<Matrix2> ms;
    for (int i = 0; i < 1024; ++i) ms.push_back(kak(rng));
    std::size_t i = 0;
    for (auto _ : st) benchmark::DoNotOptimize(classify(ms[i++ & 1023]));
}
BENCHMARK(BM_Classify);

void BM_ClassifyPair(benchmark::State& st) {
    std::mt19937_64 rng(3);
    std::vector<CocyclePair> ps;
    for (int i = 0; i < 1024; ++i) ps.push_back({kak(rng), kak(rng)});
    std::size_t i = 0;
    for (auto _ : st) benchmark::DoNotOptimize(classifyPair(ps[i++ & 1023]));
}
BENCHMARK(BM_ClassifyPair);

void BM_TauPowerTypes(benchmark::State& st) {
    const auto [A, B] = canonicalRotationPair(1.0, 2.0, 2.5);
    for (auto _ : st) benchmark::DoNotOptimize(tauPowerTypeSequence({A, B}, 1, static_cast<std::size_t>(st.range(0))));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_TauPowerTypes)->Arg(100)->Arg(10000);

void BM_ConeCertificate(benchmark::State& st) {
    const Matrix2 A = translationAlong(BoundaryPoint::fromValue(0.0), BoundaryPoint::infinity(), 1.5);
    const Matrix2 B = translationAlong(BoundaryPoint::fromValue(3.0), BoundaryPoint::fromValue(1.0), 1.5);
    for (auto _ : st) benchmark::DoNotOptimize(coneCertificate({A, B}, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_ConeCertificate)->Arg(8)->Arg(12);

void BM_EllipticWindow(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(ellipticProductWindow(1.5, 2.0));
}
BENCHMARK(BM_EllipticWindow);

void BM_HHThresholds(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(hhMinusThresholds(1.0, 0.8));
}
BENCHMARK(BM_HHThresholds);

}  // namespace

BENCHMARK_MAIN();
