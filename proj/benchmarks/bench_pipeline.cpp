#include <benchmark/benchmark.h>

#include "usreg/phantom.hpp"
#include "usreg/registration.hpp"
#include "usreg/segmentation.hpp"

using namespace usreg;

static void BM_SegmentRoi(benchmark::State& state) {
  PhantomSpec spec;
  const int n = static_cast<int>(state.range(0));
  spec.dims = {n, n, n};
  spec.seed = 42;
  const PhantomResult ph = generate_phantom(spec);
  for (auto _ : state) {
    const RoiMask roi = segment_roi(ph.volume);
    benchmark::DoNotOptimize(roi.bits.data());
  }
}
BENCHMARK(BM_SegmentRoi)->Arg(96)->Arg(199)->Unit(benchmark::kMillisecond);

static void BM_RegisterFrame(benchmark::State& state) {
  PhantomSpec spec;
  spec.dims = {199, 199, 199};
  spec.seed = 42;
  const PhantomResult ph = generate_phantom(spec);
  const RoiMask roi = segment_roi(ph.volume);
  const RigidTransform truth{{2.0, 1.5, -1.0}, {1.0, -2.0, 3.0}};
  const SliceSet frame =
      extract_slices(ph.volume, truth, default_biplane_layout(ph.volume));
  for (auto _ : state) {
    const RegistrationResult r =
        register_frame(ph.volume, roi, frame, RigidTransform::identity());
    benchmark::DoNotOptimize(r.ncc);
  }
}
BENCHMARK(BM_RegisterFrame)->Unit(benchmark::kSecond)->Iterations(3);

BENCHMARK_MAIN();
