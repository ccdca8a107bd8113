#include <benchmark/benchmark.h>

#include <random>

#include "reposevol/geometry.hpp"
#include "reposevol/pile_synth.hpp"
#include "reposevol/sensitivity.hpp"
#include "reposevol/volume.hpp"

namespace {

using namespace reposevol;

PileSpec cone(double r) {
  PileSpec spec;
  spec.radius_px = r;
  spec.center = {r + 2.3, r + 2.7};
  return spec;
}

RasterMask noisy_mask(int size) {
  std::mt19937_64 rng(42);
  std::bernoulli_distribution bit(0.9);
  RasterMask mask(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) mask.set(x, y, bit(rng));
  return mask;
}

void BM_DistanceTransform(benchmark::State& state) {
  const RasterMask mask = noisy_mask(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(distance_transform(mask));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_DistanceTransform)->Arg(64)->Arg(256)->Arg(1024);

void BM_PolygonDistanceField(benchmark::State& state) {
  const double r = static_cast<double>(state.range(0));
  const PileContour contour = make_contour(cone(r));
  const int size = static_cast<int>(2 * r + 6);
  for (auto _ : state) benchmark::DoNotOptimize(polygon_distance_field(contour, size, size));
}
BENCHMARK(BM_PolygonDistanceField)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_OutlineDistanceField(benchmark::State& state) {
  const double r = static_cast<double>(state.range(0));
  const int size = static_cast<int>(2 * r + 6);
  const RasterMask mask = rasterize(make_contour(cone(r)), size, size);
  for (auto _ : state) benchmark::DoNotOptimize(outline_distance_field(mask));
}
BENCHMARK(BM_OutlineDistanceField)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_EstimatePile(benchmark::State& state) {
  const PileContour contour = make_contour(cone(100));
  const MaterialSpec material("sand", 1.6, ReposeAngle(32.78));
  const auto path = static_cast<DistancePath>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_pile(contour, GridGeometry(0.01), material, path));
  state.SetLabel(to_string(path));
}
BENCHMARK(BM_EstimatePile)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_BruteForceVolume(benchmark::State& state) {
  const PileSpec spec = cone(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_volume(spec, GridGeometry(0.01), ReposeAngle(32.78)));
}
BENCHMARK(BM_BruteForceVolume)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_DownsampleMask(benchmark::State& state) {
  const RasterMask mask = noisy_mask(560);
  for (auto _ : state) benchmark::DoNotOptimize(downsample_mask(mask, 8.4));
}
BENCHMARK(BM_DownsampleMask);

}  // namespace

BENCHMARK_MAIN();
