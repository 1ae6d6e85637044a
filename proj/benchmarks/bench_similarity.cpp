#include <benchmark/benchmark.h>

#include "usreg/phantom.hpp"
#include "usreg/segmentation.hpp"
#include "usreg/similarity.hpp"

using namespace usreg;

namespace {

struct NccBench {
  PhantomResult phantom;
  RoiMask roi;
  SliceSet frame;

  NccBench() {
    PhantomSpec spec;
    spec.dims = {199, 199, 199};
    spec.seed = 42;
    phantom = generate_phantom(spec);
    roi = segment_roi(phantom.volume);
    frame = extract_slices(phantom.volume, RigidTransform::identity(),
                           default_biplane_layout(phantom.volume));
  }
};

const NccBench& bench() {
  static const NccBench b;
  return b;
}

}  // namespace

// One cost evaluation of the registration loop at full 199^3 / 2x199^2
// scale; the per-registration budget is roughly this times the simplex
// evaluation count.
static void BM_NccFullScale(benchmark::State& state) {
  const NccBench& b = bench();
  NccOptions opts;
  opts.rotation_center = b.phantom.volume.world_center();
  const RigidTransform candidate{{1.0, -0.5, 0.25}, {0.5, -0.25, 1.0}};
  for (auto _ : state) {
    const NccResult r =
        ncc(b.frame, b.phantom.volume, b.roi, candidate, opts);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_NccFullScale)->Unit(benchmark::kMillisecond);

static void BM_NccUngated(benchmark::State& state) {
  const NccBench& b = bench();
  NccOptions opts;
  opts.rotation_center = b.phantom.volume.world_center();
  opts.roi_gating = false;
  const RigidTransform candidate{{1.0, -0.5, 0.25}, {0.5, -0.25, 1.0}};
  for (auto _ : state) {
    const NccResult r =
        ncc(b.frame, b.phantom.volume, b.roi, candidate, opts);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_NccUngated)->Unit(benchmark::kMillisecond);
