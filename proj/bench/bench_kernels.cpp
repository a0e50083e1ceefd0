// OpenMP kernels against their serial references on the Hertz benchmark.

#include "hnc/scenario.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace hnc;

const System& hertz() {
    static const System sys = build_system(build_setup(hertz_scenario()));
    return sys;
}

Vector state() {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<Real> d(-1e-3, 1e-3);
    Vector x(hertz().layout().total());
    for (Index i = 0; i < x.size(); ++i) x(i) = d(rng);
    return x;
}

void BM_AssembleElasticity(benchmark::State& st) {
    const BodySetup& b = hertz().body(2);
    for (auto _ : st) benchmark::DoNotOptimize(assemble_elasticity(b.mesh, b.material));
}

void BM_AssembleElasticityReference(benchmark::State& st) {
    const BodySetup& b = hertz().body(2);
    for (auto _ : st) benchmark::DoNotOptimize(assemble_elasticity_reference(b.mesh, b.material));
}

void BM_ContactResidual(benchmark::State& st) {
    const auto& op = hertz().contact();
    const Vector x = state();
    const auto flags = op.active_set(x);
    for (auto _ : st) benchmark::DoNotOptimize(op.residual(x, flags));
}

void BM_ContactResidualReference(benchmark::State& st) {
    const auto& op = hertz().contact();
    const Vector x = state();
    const auto flags = op.active_set(x);
    for (auto _ : st) benchmark::DoNotOptimize(op.residual_reference(x, flags));
}

void BM_ContactJacobian(benchmark::State& st) {
    const auto& op = hertz().contact();
    const auto flags = op.active_set(state());
    for (auto _ : st) benchmark::DoNotOptimize(op.jacobian(flags));
}

void BM_ContactJacobianReference(benchmark::State& st) {
    const auto& op = hertz().contact();
    const auto flags = op.active_set(state());
    for (auto _ : st) benchmark::DoNotOptimize(op.jacobian_reference(flags));
}

}  // namespace

BENCHMARK(BM_AssembleElasticity)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleElasticityReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ContactResidual)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ContactResidualReference)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ContactJacobian)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ContactJacobianReference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
