#include <benchmark/benchmark.h>

#include "scdmi/algebra.hpp"

namespace {

void BM_ExpandCore(benchmark::State& state) {
  const scdmi::CoreSpec core = scdmi::table1_cores()[static_cast<std::size_t>(state.range(0))];
  for (auto _ : state) {
    benchmark::DoNotOptimize(scdmi::expand_core(core));
  }
  state.SetLabel("row " + std::to_string(state.range(0) + 1));
}
BENCHMARK(BM_ExpandCore)->Arg(2)->Arg(12)->Arg(24)->Unit(benchmark::kMicrosecond);

void BM_ExpandAllCores(benchmark::State& state) {
  const auto cores = scdmi::table1_cores();
  for (auto _ : state) {
    for (const auto& core : cores) benchmark::DoNotOptimize(scdmi::expand_core(core));
  }
}
BENCHMARK(BM_ExpandAllCores)->Unit(benchmark::kMillisecond);

void BM_SerializeRoundTrip(benchmark::State& state) {
  const scdmi::MomentPolynomial& poly = scdmi::table1_specs()[24].numerator;
  for (auto _ : state) {
    benchmark::DoNotOptimize(scdmi::parse_polynomial(scdmi::serialize_polynomial(poly)));
  }
}
BENCHMARK(BM_SerializeRoundTrip)->Unit(benchmark::kMicrosecond);

}  // namespace
