// Serial reference vs OpenMP path for the parallel kernels.
// Arg 0 is the serial path, arg 1 the parallel one.
#include <benchmark/benchmark.h>

#include <cmath>

#include "tra/asymptotics.hpp"
#include "tra/physics.hpp"
#include "tra/polyfam.hpp"
#include "tra/quadrature.hpp"

using namespace tra;

static void BM_HamiltonianMatrix(benchmark::State& st) {
    AssemblyOptions opt;
    opt.parallel = st.range(0) != 0;
    const BasisSpec b = basis_spec(Morse{0.5, -4.0, 1.0}, Route::MP, {}, -2.0);
    for (auto _ : st) benchmark::DoNotOptimize(hamiltonian_matrix(b, 120, opt));
}
BENCHMARK(BM_HamiltonianMatrix)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_DEIntegrate(benchmark::State& st) {
    DEOptions opt;
    opt.parallel = st.range(0) != 0;
    opt.tol = 1e-14;
    const FamilyParams p = Wilson{cplx(1.1), cplx(0.8), cplx(0.5), cplx(0.5)};
    const WeightSpec w = weight(p);
    auto f = [&](double z, double* out) {
        const auto P = poly_eval_all(p, 10, z * z);
        const double d = w.density(z);
        for (int n = 0; n <= 10; ++n) out[n] = d * P[n] * P[n];
    };
    for (auto _ : st) benchmark::DoNotOptimize(de_integrate(f, 11, DEDomain::HalfLine, 0.0, 0.0, opt));
}
BENCHMARK(BM_DEIntegrate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_OrthogonalityGram(benchmark::State& st) {
    QuadOptions q;
    q.parallel = st.range(0) != 0;
    const FamilyParams p = ContinuousDualHahn{1.2, cplx(0.75), cplx(0.75)};
    for (auto _ : st) benchmark::DoNotOptimize(orthogonality_gram(p, 10, q));
}
BENCHMARK(BM_OrthogonalityGram)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_ScanScattering(benchmark::State& st) {
    const FamilyParams p = MeixnerPollaczek{1.0, 1.0};
    std::vector<double> zs;
    for (int i = 1; i <= 16; ++i) zs.push_back(0.25 * i);
    for (auto _ : st) benchmark::DoNotOptimize(scan_scattering(p, zs, {}, st.range(0) != 0));
}
BENCHMARK(BM_ScanScattering)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
