// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "qgp/heom.hpp"
#include "qgp/sweep.hpp"

using namespace qgp;

namespace {

std::vector<Mat2> random_state(std::size_t n) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<Mat2> v(n);
    for (auto& a : v) {
        for (auto& z : a.m) z = {g(rng), g(rng)};
    }
    return v;
}

template <bool Parallel>
void BM_rhs(benchmark::State& state) {
    const heom::Hierarchy h(static_cast<int>(state.range(0)));
    const heom::Coefficients c(h, {1.2, 0.05});
    const std::vector<Mat2> in = random_state(h.size());
    std::vector<Mat2> out(h.size());
    for (auto _ : state) {
        if constexpr (Parallel) {
            heom::rhs_parallel(c, in, out);
        } else {
            heom::rhs_serial(c, in, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(h.size()));
}

sweep::SweepSpec grid_spec(sweep::Method m) {
    sweep::SweepSpec s;
    s.method = m;
    s.thetas = sweep::open_grid(0.0, kPi, 20);
    s.couplings = sweep::upper_grid(1.5, m == sweep::Method::Heom ? 4 : 20);
    s.widths = {0.3};
    s.heom.steps = 1000;
    return s;
}

template <bool Parallel>
void BM_grid(benchmark::State& state) {
    const auto spec = grid_spec(static_cast<sweep::Method>(state.range(0)));
    for (auto _ : state) {
        auto t = Parallel ? sweep::run_grid(spec) : sweep::run_grid_serial(spec);
        benchmark::DoNotOptimize(t.rows.data());
    }
}

}  // namespace

BENCHMARK(BM_rhs<false>)->Arg(10)->Arg(40)->Arg(100);
BENCHMARK(BM_rhs<true>)->Arg(10)->Arg(40)->Arg(100);
BENCHMARK(BM_grid<false>)
    ->Arg(static_cast<int>(sweep::Method::RwaClosed))
    ->Arg(static_cast<int>(sweep::Method::Heom))
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_grid<true>)
    ->Arg(static_cast<int>(sweep::Method::RwaClosed))
    ->Arg(static_cast<int>(sweep::Method::Heom))
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
