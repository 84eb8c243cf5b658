#include <benchmark/benchmark.h>

#include "sgdlab/sgdlab.hpp"

namespace {

using namespace sgdlab;

void BM_RunSgd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Problem p = build_ss_construction(n, 1.0, 1.0, 50.0);
  RunConfig cfg{Scheme::kRandomReshuffle, recommended_eta(n, 100, 1.0), 100,
                initial_point(Construction::kSingleShuffle, X0Preset::kFigure1, 1.0, 1.0, 50.0), 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_sgd(p, cfg).final_loss());
    ++cfg.seed;
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * cfg.epochs));
}
BENCHMARK(BM_RunSgd)->Arg(100)->Arg(500);

void BM_ClosedFormSingleShuffle(benchmark::State& state) {
  const std::size_t n = 500;
  const auto k = static_cast<std::size_t>(state.range(0));
  const Problem p = build_ss_construction(n, 1.0, 1.0, 200.0);
  RunConfig cfg{Scheme::kSingleShuffle, recommended_eta(n, k, 1.0), k,
                initial_point(Construction::kSingleShuffle, X0Preset::kFigure1, 1.0, 1.0, 200.0), 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_sgd_closed_form(p, cfg).final_loss());
    ++cfg.seed;
  }
}
BENCHMARK(BM_ClosedFormSingleShuffle)->Arg(40)->Arg(2000);

void BM_PermutationMomentsExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> a(n, 0.0), b(n, 0.5);
  for (std::size_t i = 0; i < n / 2; ++i) a[i] = 2.0, b[i] = -0.5;
  for (auto _ : state) benchmark::DoNotOptimize(permutation_moments(a, b, 0.01).e_q2);
}
BENCHMARK(BM_PermutationMomentsExact)->Arg(16)->Arg(100)->Arg(500);

void BM_PermutationMomentsEnumeration(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> a(n, 0.0), b(n, 0.5);
  for (std::size_t i = 0; i < n / 2; ++i) a[i] = 2.0, b[i] = -0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(permutation_moments(a, b, 0.01, MomentMethod::enumeration()).e_q2);
  }
}
BENCHMARK(BM_PermutationMomentsEnumeration)->Arg(8)->Arg(16);

void BM_BetaExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(beta_exact(n, 0.1, 1.0));
}
BENCHMARK(BM_BetaExact)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
