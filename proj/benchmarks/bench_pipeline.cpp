#include <benchmark/benchmark.h>

#include "scdmi/moments.hpp"
#include "scdmi/oracle.hpp"
#include "scdmi/synthetic.hpp"
#include "scdmi/transforms.hpp"

namespace {

scdmi::RasterImage scene(int size) {
  return scdmi::render_scene(scdmi::random_scene(7), size, size);
}

void BM_MomentTable(benchmark::State& state) {
  const scdmi::RasterImage img = scene(static_cast<int>(state.range(0)));
  const int k = static_cast<int>(state.range(1));
  const scdmi::ChannelSet channels = scdmi::make_channel_set(img, k);
  for (auto _ : state) {
    benchmark::DoNotOptimize(scdmi::compute_moment_table(channels, scdmi::required_indices()));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(channels.masked_count()));
}
BENCHMARK(BM_MomentTable)->Args({128, 0})->Args({512, 0})->Args({512, 1})->Unit(benchmark::kMillisecond);

void BM_Scdmi50(benchmark::State& state) {
  const scdmi::RasterImage img = scene(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(scdmi::scdmi50(img));
}
BENCHMARK(BM_Scdmi50)->Arg(64)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_BruteForceInvariant(benchmark::State& state) {
  const scdmi::RasterImage img = scdmi::random_noise_image(1, 6, 6);
  const scdmi::InvariantSpec& spec = scdmi::table1_specs()[static_cast<std::size_t>(state.range(0))];
  for (auto _ : state) benchmark::DoNotOptimize(scdmi::brute_force_invariant(img, spec));
  state.SetLabel("k" + std::to_string(spec.k) + " id " + std::to_string(spec.id));
}
BENCHMARK(BM_BruteForceInvariant)->Arg(2)->Arg(24)->Arg(27)->Unit(benchmark::kMillisecond);

void BM_BilinearWarp(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const scdmi::RasterImage img = scene(size);
  const scdmi::ShapeAffine t =
      scdmi::sample_shape_affine(3, {0.5, 2.0}, 3.0, {(size - 1) / 2.0, (size - 1) / 2.0});
  for (auto _ : state) benchmark::DoNotOptimize(scdmi::apply_shape_affine(img, t));
}
BENCHMARK(BM_BilinearWarp)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace
