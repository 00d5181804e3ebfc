#include <benchmark/benchmark.h>

#include <random>

#include "mk/assignment.hpp"
#include "mk/dbar.hpp"
#include "mk/matrix_distribution.hpp"
#include "mk/tower.hpp"
#include "mk/transport.hpp"

namespace {

void BM_Convergence(benchmark::State& state) {
    const bool parallel = state.range(0) != 0;
    const auto triple = mk::uniform01_triple();
    const auto map = mk::MapSpec::square();
    for (auto _ : state) {
        auto r = parallel ? mk::run_convergence(triple, map, {25, 50, 100}, 8, 42)
                          : mk::run_convergence_serial(triple, map, {25, 50, 100}, 8, 42);
        benchmark::DoNotOptimize(r.estimates);
    }
}
BENCHMARK(BM_Convergence)->Arg(0)->Arg(1)->ArgNames({"parallel"})->Unit(benchmark::kMillisecond);

void BM_Dbar(benchmark::State& state) {
    const bool parallel = state.range(0) != 0;
    mk::MarkovChain chain(mk::Matrix{{0.6, 0.3, 0.1}, {0.2, 0.5, 0.3}, {0.3, 0.3, 0.4}});
    for (auto _ : state) {
        const double v = parallel ? mk::dbar_criterion(chain, 5) : mk::dbar_criterion_serial(chain, 5);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_Dbar)->Arg(0)->Arg(1)->ArgNames({"parallel"})->Unit(benchmark::kMillisecond);

void BM_QuotientStep(benchmark::State& state) {
    const bool parallel = state.range(0) != 0;
    const auto tree = mk::dyadic_hamming_tree(8);
    const auto base = mk::base_space(tree);
    const auto map = tree.next_partition(0);
    for (auto _ : state) {
        auto next = parallel ? mk::quotient_step(base, map) : mk::quotient_step_serial(base, map);
        benchmark::DoNotOptimize(next.metric);
    }
}
BENCHMARK(BM_QuotientStep)->Arg(0)->Arg(1)->ArgNames({"parallel"})->Unit(benchmark::kMillisecond);

void BM_EpsilonEntropy(benchmark::State& state) {
    const bool parallel = state.range(0) != 0;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = 8;
    std::vector<double> pts(n), w(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = u(rng);
        w[i] = u(rng);
        total += w[i];
    }
    for (double& x : w) x /= total;
    mk::Matrix c(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c(i, j) = std::abs(pts[i] - pts[j]);
    const mk::CostSpace cost(c, true);
    const mk::FiniteDistribution nu(w);
    const mk::EntropySearch search{3, 200};
    for (auto _ : state) {
        auto r = parallel ? mk::epsilon_entropy(nu, cost, 0.05, search) : mk::epsilon_entropy_serial(nu, cost, 0.05, search);
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(BM_EpsilonEntropy)->Arg(0)->Arg(1)->ArgNames({"parallel"})->Unit(benchmark::kMillisecond);

void BM_SolveMk(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> pts(n), a(n), b(n);
    double ta = 0.0, tb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = u(rng);
        a[i] = u(rng);
        b[i] = u(rng);
        ta += a[i];
        tb += b[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        a[i] /= ta;
        b[i] /= tb;
    }
    mk::Matrix c(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c(i, j) = std::abs(pts[i] - pts[j]);
    for (auto _ : state) benchmark::DoNotOptimize(mk::solve_mk(c, a, b).value);
}
BENCHMARK(BM_SolveMk)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Assignment(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto sample = mk::shifted_matrix(mk::uniform01_triple(), mk::MapSpec::square(), n, 7);
    for (auto _ : state) benchmark::DoNotOptimize(mk::solve_assignment(sample.entries).value);
}
BENCHMARK(BM_Assignment)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
