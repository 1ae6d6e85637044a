#include <benchmark/benchmark.h>

#include "usreg/phantom.hpp"
#include "usreg/rng.hpp"
#include "usreg/volume.hpp"

using namespace usreg;

namespace {

const Volume3D& bench_volume() {
  static const Volume3D vol = [] {
    PhantomSpec spec;
    spec.dims = {128, 128, 128};
    spec.seed = 42;
    return generate_phantom(spec).volume;
  }();
  return vol;
}

}  // namespace

static void BM_SampleTrilinear(benchmark::State& state) {
  const Volume3D& vol = bench_volume();
  Rng rng(1);
  std::vector<Vec3> points(4096);
  for (auto& p : points) {
    p = {rng.uniform(-15, 15), rng.uniform(-15, 15), rng.uniform(-15, 15)};
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const SampleResult s = sample_trilinear(vol, points[i++ & 4095]);
    benchmark::DoNotOptimize(s.value);
  }
}
BENCHMARK(BM_SampleTrilinear);

static void BM_ExtractBiplane(benchmark::State& state) {
  const Volume3D& vol = bench_volume();
  const auto layout = default_biplane_layout(vol);
  const RigidTransform pose{{2.0, -1.0, 0.5}, {1.0, 2.0, -3.0}};
  for (auto _ : state) {
    const SliceSet set = extract_slices(vol, pose, layout);
    benchmark::DoNotOptimize(set.planes[0].intensities.data());
  }
}
BENCHMARK(BM_ExtractBiplane)->Unit(benchmark::kMillisecond);
