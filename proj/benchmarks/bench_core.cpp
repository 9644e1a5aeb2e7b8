#include <random>

#include <benchmark/benchmark.h>

#include "multiflow/dynamics.hpp"
#include "multiflow/random_states.hpp"
#include "multiflow/scenarios.hpp"
#include "multiflow/spectral.hpp"

namespace mf = multiflow;

namespace {

void bm_gradient(benchmark::State& state) {
    mf::Grid grid(2, static_cast<int>(state.range(0)));
    std::mt19937_64 rng(7);
    mf::ScalarField f = mf::random_scalar(grid, rng, {5, 1.0});
    for (auto _ : state) benchmark::DoNotOptimize(mf::gradient(f));
}
BENCHMARK(bm_gradient)->Arg(64)->Arg(128)->Arg(256);

void bm_poisson(benchmark::State& state) {
    mf::Grid grid(2, static_cast<int>(state.range(0)));
    std::mt19937_64 rng(7);
    mf::ScalarField g = mf::random_scalar(grid, rng, {5, 1.0});
    for (auto _ : state) benchmark::DoNotOptimize(mf::solve_poisson(g));
}
BENCHMARK(bm_poisson)->Arg(64)->Arg(128)->Arg(256);

void bm_weighted_poisson(benchmark::State& state) {
    mf::Grid grid(2, static_cast<int>(state.range(0)));
    std::mt19937_64 rng(7);
    mf::ScalarField g = mf::random_scalar(grid, rng, {5, 1.0});
    mf::ScalarField rho = mf::random_scalar(grid, rng, {3, 0.4});
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] += 1.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(mf::solve_weighted_poisson(rho, g));
}
BENCHMARK(bm_weighted_poisson)->Arg(64)->Arg(128);

void bm_step_rk4(benchmark::State& state) {
    mf::ScenarioConfig cfg = mf::default_config("two_phase_shear");
    cfg.N = static_cast<int>(state.range(0));
    mf::FlowState s = mf::build_scenario(cfg);
    for (auto _ : state) {
        mf::FlowState copy = s;
        mf::step_rk4(copy, 1e-3);
        benchmark::DoNotOptimize(copy);
    }
}
BENCHMARK(bm_step_rk4)->Arg(64)->Arg(128);

void bm_rhs_coset(benchmark::State& state) {
    mf::Grid grid(2, static_cast<int>(state.range(0)));
    std::mt19937_64 rng(7);
    mf::QuadratureSet quad = mf::random_unit_quadrature(2, 2, rng);
    mf::MultiDensity rho = mf::random_density(grid, quad, rng);
    mf::MomentumCoset a = mf::random_coset(rho, rng);
    for (auto _ : state) benchmark::DoNotOptimize(mf::rhs_coset(a));
}
BENCHMARK(bm_rhs_coset)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
