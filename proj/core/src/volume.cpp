#include "usreg/volume.hpp"

#include <cmath>
#include <utility>

#include "usreg/errors.hpp"

namespace usreg {

namespace {

// Tolerance (in voxel-index units) for snapping a continuous index onto
// a grid node. Plane layouts computed in world mm land on voxel centers
// only up to rounding; snapping keeps grid-aligned reslices exact.
constexpr double kNodeSnap = 1e-9;

}  // namespace

Volume3D::Volume3D(IVec3 d, Vec3 sp, Vec3 org, double fill)
    : dims(d), spacing(sp), origin(org) {
  if (d.x <= 0 || d.y <= 0 || d.z <= 0) {
    raise(ErrorCode::invalid_spec, "volume dims must be positive");
  }
  if (sp.x <= 0.0 || sp.y <= 0.0 || sp.z <= 0.0) {
    raise(ErrorCode::invalid_spec, "volume spacing must be positive");
  }
  data.assign(static_cast<std::size_t>(d.product()), fill);
}

void Volume3D::validate() const {
  if (dims.x <= 0 || dims.y <= 0 || dims.z <= 0) {
    raise(ErrorCode::invalid_spec, "volume dims must be positive");
  }
  if (spacing.x <= 0.0 || spacing.y <= 0.0 || spacing.z <= 0.0) {
    raise(ErrorCode::invalid_spec, "volume spacing must be positive");
  }
  if (data.size() != static_cast<std::size_t>(dims.product())) {
    raise(ErrorCode::size_mismatch,
          "volume data length does not match dims product");
  }
  for (double v : data) {
    if (!std::isfinite(v)) {
      raise(ErrorCode::invalid_data, "volume contains non-finite intensity");
    }
  }
}

Vec3 centered_origin(IVec3 dims, Vec3 spacing) {
  return {-0.5 * (dims.x - 1) * spacing.x, -0.5 * (dims.y - 1) * spacing.y,
          -0.5 * (dims.z - 1) * spacing.z};
}

SampleResult sample_trilinear(const Volume3D& vol, const Vec3& p) {
  return detail::sample_trilinear_ci(vol, (p.x - vol.origin.x) / vol.spacing.x,
                                     (p.y - vol.origin.y) / vol.spacing.y,
                                     (p.z - vol.origin.z) / vol.spacing.z);
}

SampleResult detail::sample_trilinear_ci(const Volume3D& vol, double cx,
                                         double cy, double cz) {
  int ix = static_cast<int>(std::floor(cx));
  int iy = static_cast<int>(std::floor(cy));
  int iz = static_cast<int>(std::floor(cz));
  double fx = cx - ix;
  double fy = cy - iy;
  double fz = cz - iz;

  auto snap = [](int& i, double& f) {
    if (f < kNodeSnap) {
      f = 0.0;
    } else if (f > 1.0 - kNodeSnap) {
      ++i;
      f = 0.0;
    }
  };
  snap(ix, fx);
  snap(iy, fy);
  snap(iz, fz);

  const int hx = fx > 0.0 ? 1 : 0;
  const int hy = fy > 0.0 ? 1 : 0;
  const int hz = fz > 0.0 ? 1 : 0;
  if (ix < 0 || iy < 0 || iz < 0 || ix + hx > vol.dims.x - 1 ||
      iy + hy > vol.dims.y - 1 || iz + hz > vol.dims.z - 1) {
    return {0.0, false};
  }

  const double v000 = vol.at(ix, iy, iz);
  const double v100 = vol.at(ix + hx, iy, iz);
  const double v010 = vol.at(ix, iy + hy, iz);
  const double v110 = vol.at(ix + hx, iy + hy, iz);
  const double v001 = vol.at(ix, iy, iz + hz);
  const double v101 = vol.at(ix + hx, iy, iz + hz);
  const double v011 = vol.at(ix, iy + hy, iz + hz);
  const double v111 = vol.at(ix + hx, iy + hy, iz + hz);

  const double c00 = v000 * (1.0 - fx) + v100 * fx;
  const double c10 = v010 * (1.0 - fx) + v110 * fx;
  const double c01 = v001 * (1.0 - fx) + v101 * fx;
  const double c11 = v011 * (1.0 - fx) + v111 * fx;
  const double c0 = c00 * (1.0 - fy) + c10 * fy;
  const double c1 = c01 * (1.0 - fy) + c11 * fy;
  return {c0 * (1.0 - fz) + c1 * fz, true};
}

Vec3 PlaneSpec::normal() const {
  return {u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x};
}

Vec3 PlaneSpec::position(int i, int j) const {
  const double du = (i - 0.5 * (extent_u - 1)) * step_mm;
  const double dv = (j - 0.5 * (extent_v - 1)) * step_mm;
  return {center.x + du * u.x + dv * v.x, center.y + du * u.y + dv * v.y,
          center.z + du * u.z + dv * v.z};
}

void PlaneSpec::validate() const {
  if (extent_u <= 0 || extent_v <= 0) {
    raise(ErrorCode::invalid_spec, "plane extent must be positive");
  }
  if (step_mm <= 0.0) {
    raise(ErrorCode::invalid_spec, "plane sample step must be positive");
  }
  if (std::abs(norm(u) - 1.0) > 1e-9 || std::abs(norm(v) - 1.0) > 1e-9) {
    raise(ErrorCode::invalid_spec, "plane axes must be unit length");
  }
  if (std::abs(dot(u, v)) > 1e-9) {
    raise(ErrorCode::invalid_spec, "plane axes must be orthogonal");
  }
}

std::size_t SliceSet::sample_count() const {
  std::size_t n = 0;
  for (const auto& p : planes) n += p.intensities.size();
  return n;
}

std::size_t SliceSet::valid_count() const {
  std::size_t n = 0;
  for (const auto& p : planes) {
    for (auto f : p.valid) n += f ? 1 : 0;
  }
  return n;
}

std::pair<PlaneSpec, PlaneSpec> default_biplane_layout(const Volume3D& vol) {
  const Vec3 c = vol.world_center();
  PlaneSpec xz;
  xz.center = c;
  xz.u = {1, 0, 0};
  xz.v = {0, 0, 1};
  xz.extent_u = vol.dims.x;
  xz.extent_v = vol.dims.z;
  xz.step_mm = vol.spacing.x;

  PlaneSpec yz;
  yz.center = c;
  yz.u = {0, 1, 0};
  yz.v = {0, 0, 1};
  yz.extent_u = vol.dims.y;
  yz.extent_v = vol.dims.z;
  yz.step_mm = vol.spacing.x;
  return {xz, yz};
}

SliceSet extract_slices(const Volume3D& vol, const RigidTransform& T,
                        const std::pair<PlaneSpec, PlaneSpec>& layout,
                        const Vec3& center) {
  const auto check = [](const PlaneSpec& p) { p.validate(); };
  check(layout.first);
  check(layout.second);
  const Vec3 n1 = layout.first.normal();
  const Vec3 n2 = layout.second.normal();
  if (std::abs(dot(n1, n2)) > 1e-9) {
    raise(ErrorCode::invalid_spec, "frame planes must be orthogonal");
  }

  const WorldMap map = world_map(T, center);
  SliceSet set;
  set.planes.reserve(2);
  for (const PlaneSpec& spec : {layout.first, layout.second}) {
    SlicePlane plane;
    plane.spec = spec;
    const std::size_t n =
        static_cast<std::size_t>(spec.extent_u) * spec.extent_v;
    plane.positions.reserve(n);
    plane.intensities.reserve(n);
    plane.valid.reserve(n);
    for (int j = 0; j < spec.extent_v; ++j) {
      for (int i = 0; i < spec.extent_u; ++i) {
        const Vec3 q = spec.position(i, j);
        const SampleResult s = sample_trilinear(vol, map.apply(q));
        plane.positions.push_back(q);
        plane.intensities.push_back(s.value);
        plane.valid.push_back(s.valid ? 1 : 0);
      }
    }
    set.planes.push_back(std::move(plane));
  }
  return set;
}

SliceSet extract_slices(const Volume3D& vol, const RigidTransform& T,
                        const std::pair<PlaneSpec, PlaneSpec>& layout) {
  return extract_slices(vol, T, layout, vol.world_center());
}

}  // namespace usreg
