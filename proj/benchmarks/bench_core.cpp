#include <benchmark/benchmark.h>

#include "gsr/errors.hpp"
#include "gsr/filters.hpp"
#include "gsr/generators.hpp"
#include "gsr/imperfect.hpp"
#include "gsr/rng.hpp"
#include "gsr/seeding.hpp"

using namespace gsr;

namespace {

ShiftOperator make_shift(int n) {
    Rng rng(4242);
    for (;;) {
        try {
            ShiftOperator s = build_shift(gen_er(n, 4.0 / n, rng), ShiftKind::Adjacency);
            decompose(s);
            return s;
        } catch (const NonDiagonalizable&) {
        }
    }
}

}  // namespace

static void BM_Decompose(benchmark::State& state) {
    const ShiftOperator s = make_shift(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(decompose(s));
}
BENCHMARK(BM_Decompose)->Unit(benchmark::kMicrosecond)->RangeMultiplier(2)->Range(16, 128);

static void BM_LowpassKernelDesign(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ShiftOperator s = make_shift(n);
    const SpectralBasis basis = decompose(s);
    const int K = n / 4;
    for (auto _ : state) {
        try {
            benchmark::DoNotOptimize(design_lowpass_kernel(basis, K));
        } catch (const FeasibilityError&) {
        }
    }
}
BENCHMARK(BM_LowpassKernelDesign)
    ->Unit(benchmark::kMicrosecond)
    ->RangeMultiplier(2)
    ->Range(16, 64);

static void BM_MnstDesign(benchmark::State& state) {
    const int n = 32, K = 8;
    Rng rng(7);
    ShiftOperator s;
    SpectralBasis basis;
    for (;;) {
        try {
            s = make_shift(n);
            basis = decompose(s);
            if (condition_i_holds(basis, K)) break;
        } catch (const NonDiagonalizable&) {
        }
    }
    const FilterDesign filter = design_lowpass_kernel(basis, K);
    Vector yhatK(K);
    for (int i = 0; i < K; ++i) yhatK[i] = Complex(rng.normal(), 0.0);
    std::vector<int> nodes;
    for (int i = 0; i < K; ++i) nodes.push_back(i);
    for (auto _ : state) {
        try {
            benchmark::DoNotOptimize(mnst_design(basis, K, nodes, yhatK, &filter));
        } catch (const FeasibilityError&) {
        }
    }
}
BENCHMARK(BM_MnstDesign)->Unit(benchmark::kMicrosecond);

static void BM_PercolateAndFilter(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ShiftOperator s = make_shift(n);
    const SpectralBasis basis = decompose(s);
    Rng rng(11);
    SeedingSchedule sched;
    sched.pattern.tau = 4;
    for (int i = 0; i < 4; ++i) sched.pattern.pairs.emplace_back(i, i % 4);
    sched.values = Vector::Ones(4);
    Vector h(n / 2);
    for (int l = 0; l < h.size(); ++l) h[l] = Complex(rng.normal() / h.size(), 0.0);
    for (auto _ : state) {
        const Vector x = simulate_seeding(s, sched);
        benchmark::DoNotOptimize(apply_filter_polynomial(s, h, x));
    }
}
BENCHMARK(BM_PercolateAndFilter)
    ->Unit(benchmark::kMicrosecond)
    ->RangeMultiplier(2)
    ->Range(16, 128);

static void BM_SelectConstantSnrGreedy(benchmark::State& state) {
    const int n = 16, K = 4;
    const SpectralBasis basis = decompose(build_shift(gen_cycle(n), ShiftKind::Adjacency));
    const ReconstructionOperator op = ReconstructionOperator::build_ideal(basis, K, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(select_constant_snr(op, 6, SelectionMethod::GreedyForward));
}
BENCHMARK(BM_SelectConstantSnrGreedy)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
