// Serial reference against OpenMP kernel for grid evaluation and validation.

#include <benchmark/benchmark.h>

#include "cimm/evaluator.hpp"
#include "cimm/fuzz.hpp"
#include "cimm/parser.hpp"

using namespace cimm;

namespace {

FiniteStructure sample(std::size_t n) {
  fuzz::Rng rng(11, n);
  return fuzz::random_structure(rng, {n, n, false});
}

const char* kFormula = R"(sup z . (rho(x, z) /\ int w . (rho(y, w) \/ rho(z, w))))";

template <auto Kernel>
void bench_evaluate(benchmark::State& state) {
  const auto s = sample(static_cast<std::size_t>(state.range(0)));
  const Formula f = parse_formula(kFormula, *s.signature);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(f, s, kDefaultPowerCap));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <auto Kernel>
void bench_validate(benchmark::State& state) {
  const auto s = sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(s, MetricKind::Metric));
}

}  // namespace

BENCHMARK(bench_evaluate<evaluate_all_serial>)->Name("evaluate_all/serial")->RangeMultiplier(2)->Range(8, 64);
BENCHMARK(bench_evaluate<evaluate_all>)->Name("evaluate_all/omp")->RangeMultiplier(2)->Range(8, 64)->UseRealTime();
BENCHMARK(bench_validate<validate_serial>)->Name("validate/serial")->RangeMultiplier(2)->Range(8, 64);
BENCHMARK(bench_validate<validate>)->Name("validate/omp")->RangeMultiplier(2)->Range(8, 64)->UseRealTime();

BENCHMARK_MAIN();
