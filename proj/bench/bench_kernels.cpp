// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <cmath>

#include "dm/vision/calibrate.hpp"
#include "dm/vision/kernels.hpp"

using namespace dm;
using namespace dm::vision;

namespace {

std::vector<Vec2> star(double r, int spikes) {
  std::vector<Vec2> pts;
  for (int i = 0; i < 2 * spikes; ++i) {
    const double a = M_PI * i / spikes;
    const double rr = i % 2 ? r * 0.45 : r;
    pts.push_back({r + 2 + rr * std::cos(a), r + 2 + rr * std::sin(a)});
  }
  return pts;
}

Raster star_raster(int px) {
  Raster r(px, px);
  const auto poly = star(px * 0.5 - 4, 9);
  rasterize_polygon_reference(r, poly, 1.0);
  return r;
}

void BM_DilateReference(benchmark::State& st) {
  const auto r = star_raster(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(dilate_reference(r, 3));
  st.SetItemsProcessed(st.iterations() * st.range(0) * st.range(0));
}

void BM_DilateSerial(benchmark::State& st) {
  const auto r = star_raster(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(dilate(r, 3, Exec::Serial));
  st.SetItemsProcessed(st.iterations() * st.range(0) * st.range(0));
}

void BM_DilateParallel(benchmark::State& st) {
  const auto r = star_raster(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(dilate(r, 3, Exec::Parallel));
  st.SetItemsProcessed(st.iterations() * st.range(0) * st.range(0));
}

void BM_RasterizeReference(benchmark::State& st) {
  const int px = static_cast<int>(st.range(0));
  const auto poly = star(px * 0.5 - 4, 9);
  for (auto _ : st) {
    Raster r(px, px);
    rasterize_polygon_reference(r, poly, 1.0);
    benchmark::DoNotOptimize(r);
  }
  st.SetItemsProcessed(st.iterations() * px * px);
}

void rasterize_with(benchmark::State& st, Exec exec) {
  const int px = static_cast<int>(st.range(0));
  const auto poly = star(px * 0.5 - 4, 9);
  for (auto _ : st) {
    Raster r(px, px);
    rasterize_polygon(r, poly, 1.0, exec);
    benchmark::DoNotOptimize(r);
  }
  st.SetItemsProcessed(st.iterations() * px * px);
}

void BM_RasterizeSerial(benchmark::State& st) { rasterize_with(st, Exec::Serial); }
void BM_RasterizeParallel(benchmark::State& st) { rasterize_with(st, Exec::Parallel); }

void calibrate_with(benchmark::State& st, Exec exec) {
  CorpusOptions opts;
  opts.total = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(calibrate_rarity(default_baselines(), opts, 1, exec));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_CalibrateSerial(benchmark::State& st) { calibrate_with(st, Exec::Serial); }
void BM_CalibrateParallel(benchmark::State& st) { calibrate_with(st, Exec::Parallel); }

}  // namespace

BENCHMARK(BM_DilateReference)->Arg(256)->Arg(1024);
BENCHMARK(BM_DilateSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_DilateParallel)->Arg(256)->Arg(1024);
BENCHMARK(BM_RasterizeReference)->Arg(256)->Arg(1024);
BENCHMARK(BM_RasterizeSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_RasterizeParallel)->Arg(256)->Arg(1024);
BENCHMARK(BM_CalibrateSerial)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CalibrateParallel)->Arg(300)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
