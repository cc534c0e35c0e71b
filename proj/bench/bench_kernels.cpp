// Serial reference kernels against their OpenMP versions on the scalar
// linear test problem used by the consistency checks.
#include <benchmark/benchmark.h>

#include <cmath>

#include "chronoscale/kernels.hpp"

using namespace chronoscale;

namespace {

struct Fixture {
    explicit Fixture(int spu)
        : grid(TimeScale::reals(0.0, 2.0), spu),
          cache(Generator(Eigen::MatrixXd::Constant(1, 1, -1.0))),
          table(grid, cache),
          y(Eigen::MatrixXd::Ones(1, static_cast<Eigen::Index>(grid.size()))),
          forcing(Eigen::MatrixXd::Constant(1, static_cast<Eigen::Index>(grid.size()), 0.3)) {}

    TimeGrid grid;
    EvolutionCache cache;
    kernels::PropagatorTable table;
    Eigen::MatrixXd y;
    Eigen::MatrixXd forcing;
};

const kernels::PairEval kH = [](double, double, std::span<const double> y, std::span<double> out) {
    out[0] = std::cos(y[0]);
};

void BM_InnerSerial(benchmark::State& state) {
    Fixture fx(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::inner_integrals_serial(fx.grid, kH, fx.y));
    state.counters["nodes"] = static_cast<double>(fx.grid.size());
}

void BM_InnerParallel(benchmark::State& state) {
    Fixture fx(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::inner_integrals_parallel(fx.grid, kH, fx.y));
    state.counters["nodes"] = static_cast<double>(fx.grid.size());
    state.counters["threads"] = kernels::max_threads();
}

void BM_SweepSerial(benchmark::State& state) {
    Fixture fx(static_cast<int>(state.range(0)));
    const Eigen::VectorXd y0 = Eigen::VectorXd::Ones(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            kernels::mild_sweep_serial(fx.grid, fx.cache, y0, fx.forcing, kernels::MildQuadrature::DeltaSum));
    }
}

void BM_SweepParallel(benchmark::State& state) {
    Fixture fx(static_cast<int>(state.range(0)));
    const Eigen::VectorXd y0 = Eigen::VectorXd::Ones(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            kernels::mild_sweep_parallel(fx.grid, fx.table, y0, fx.forcing, kernels::MildQuadrature::DeltaSum));
    }
    state.counters["threads"] = kernels::max_threads();
}

}  // namespace

BENCHMARK(BM_InnerSerial)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InnerParallel)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
