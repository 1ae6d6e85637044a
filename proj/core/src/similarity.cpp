#include "usreg/similarity.hpp"

#include <cmath>

#include "usreg/errors.hpp"

namespace usreg {

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.subspan(0, half)) +
         pairwise_sum(values.subspan(half));
}

NccResult ncc_from_pairs(std::span<const double> a, std::span<const double> b,
                         std::size_t min_samples) {
  NccResult r;
  r.sample_count = a.size();
  if (a.size() != b.size()) {
    raise(ErrorCode::dimension_mismatch, "ncc sample vectors differ in size");
  }
  if (a.size() < min_samples || a.empty()) {
    r.status = NccStatus::insufficient_overlap;
    return r;
  }

  const double n = static_cast<double>(a.size());
  const double mean_a = pairwise_sum(a) / n;
  const double mean_b = pairwise_sum(b) / n;

  std::vector<double> cross(a.size());
  std::vector<double> var_a(a.size());
  std::vector<double> var_b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cross[i] = da * db;
    var_a[i] = da * da;
    var_b[i] = db * db;
  }
  const double sum_cross = pairwise_sum(cross);
  const double sum_a = pairwise_sum(var_a);
  const double sum_b = pairwise_sum(var_b);
  if (sum_a < 1e-12 || sum_b < 1e-12) {
    r.status = NccStatus::zero_variance;
    return r;
  }
  r.value = sum_cross / std::sqrt(sum_a * sum_b);
  r.status = NccStatus::ok;
  return r;
}

NccResult ncc(const SliceSet& frame, const Volume3D& vol, const RoiMask& roi,
              const RigidTransform& T, const NccOptions& opts) {
  if (opts.roi_gating && roi.dims.product() > 0 &&
      !(roi.dims == vol.dims)) {
    raise(ErrorCode::dimension_mismatch, "ROI dims do not match volume dims");
  }

  const WorldMap map = world_map(T, opts.rotation_center);

  std::vector<double> a;
  std::vector<double> b;
  a.reserve(frame.sample_count());
  b.reserve(frame.sample_count());
  std::size_t valid_total = 0;

  for (const SlicePlane& plane : frame.planes) {
    for (std::size_t i = 0; i < plane.positions.size(); ++i) {
      if (!plane.valid[i]) continue;
      ++valid_total;
      const Vec3 p = map.apply(plane.positions[i]);
      const double cx = (p.x - vol.origin.x) / vol.spacing.x;
      const double cy = (p.y - vol.origin.y) / vol.spacing.y;
      const double cz = (p.z - vol.origin.z) / vol.spacing.z;
      if (opts.roi_gating) {
        // Nearest-voxel gate before the interpolation work.
        const int nx = static_cast<int>(std::lround(cx));
        const int ny = static_cast<int>(std::lround(cy));
        const int nz = static_cast<int>(std::lround(cz));
        if (nx < 0 || ny < 0 || nz < 0 || nx >= roi.dims.x ||
            ny >= roi.dims.y || nz >= roi.dims.z) {
          continue;
        }
        if (!roi.bits[roi.index(nx, ny, nz)]) continue;
      }
      const SampleResult s = detail::sample_trilinear_ci(vol, cx, cy, cz);
      if (!s.valid) continue;
      a.push_back(plane.intensities[i]);
      b.push_back(s.value);
    }
  }

  NccResult r = ncc_from_pairs(a, b, opts.min_samples);
  r.sample_count = a.size();
  r.overlap_fraction =
      valid_total == 0
          ? 0.0
          : static_cast<double>(a.size()) / static_cast<double>(valid_total);
  return r;
}

}  // namespace usreg
