#pragma once

#include <cstdint>
#include <vector>

#include "usreg/geometry.hpp"
#include "usreg/transform.hpp"

namespace usreg {

/// Scalar voxel grid with physical spacing. Memory order is x fastest,
/// then y, then z; world mapping is world = origin + index * spacing with
/// no orientation matrix. Intensities are normalized to [0, 1].
/// Immutable after construction as far as the registration pipeline is
/// concerned; all sampling operations are pure reads.
struct Volume3D {
  IVec3 dims{0, 0, 0};
  Vec3 spacing{1.0, 1.0, 1.0};  // mm per voxel
  Vec3 origin{0.0, 0.0, 0.0};   // world position of voxel (0,0,0) center, mm
  std::vector<double> data;

  Volume3D() = default;
  Volume3D(IVec3 d, Vec3 sp, Vec3 org, double fill = 0.0);

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims.x) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(dims.y) * static_cast<std::size_t>(z));
  }

  double at(int x, int y, int z) const { return data[index(x, y, z)]; }
  double& at(int x, int y, int z) { return data[index(x, y, z)]; }

  Vec3 world_at(int x, int y, int z) const {
    return {origin.x + x * spacing.x, origin.y + y * spacing.y,
            origin.z + z * spacing.z};
  }

  /// World position of the grid center, the default rotation pivot.
  Vec3 world_center() const {
    return {origin.x + 0.5 * (dims.x - 1) * spacing.x,
            origin.y + 0.5 * (dims.y - 1) * spacing.y,
            origin.z + 0.5 * (dims.z - 1) * spacing.z};
  }

  /// Checks dims/spacing/data-size/finiteness invariants; throws on violation.
  void validate() const;
};

/// Origin that puts the grid center exactly at the world origin.
Vec3 centered_origin(IVec3 dims, Vec3 spacing);

struct SampleResult {
  double value = 0.0;
  bool valid = false;
};

/// Trilinear interpolation at world point p. Points outside the
/// voxel-center bounding box are reported invalid rather than clamped,
/// so out-of-volume samples never bias a similarity measure.
SampleResult sample_trilinear(const Volume3D& vol, const Vec3& p);

namespace detail {
/// Interpolation in continuous index coordinates ((p - origin)/spacing);
/// shared by the world-space sampler and the similarity hot loop so
/// gating and sampling always agree on geometry.
SampleResult sample_trilinear_ci(const Volume3D& vol, double cx, double cy,
                                 double cz);
}  // namespace detail

/// One sampled plane of a simulated frame: center, orthonormal in-plane
/// axes, sample counts and step in mm.
struct PlaneSpec {
  Vec3 center{0, 0, 0};
  Vec3 u{1, 0, 0};
  Vec3 v{0, 1, 0};
  int extent_u = 0;
  int extent_v = 0;
  double step_mm = 1.0;

  Vec3 normal() const;
  Vec3 position(int i, int j) const;

  /// u,v orthonormal within 1e-9 and extents/step positive.
  void validate() const;
};

/// A simulated 4D frame: two orthogonal sampled planes with per-sample
/// frame-local positions, intensities and validity flags.
struct SlicePlane {
  PlaneSpec spec;
  std::vector<Vec3> positions;       // frame-local coordinates, mm
  std::vector<double> intensities;
  std::vector<std::uint8_t> valid;
};

struct SliceSet {
  std::vector<SlicePlane> planes;

  std::size_t sample_count() const;
  std::size_t valid_count() const;
};

/// Two orthogonal beam-aligned planes through the volume center, each
/// spanning the beam (z) axis and one lateral axis, sampled at the
/// volume's x spacing.
std::pair<PlaneSpec, PlaneSpec> default_biplane_layout(const Volume3D& vol);

/// Reslices the volume at pose T (rotating about `center`): every plane
/// sample q keeps its frame-local position and stores the intensity of the
/// volume at world point T(q). Identity pose with grid-aligned planes
/// through the center reproduces the central voxel planes exactly.
SliceSet extract_slices(const Volume3D& vol, const RigidTransform& T,
                        const std::pair<PlaneSpec, PlaneSpec>& layout,
                        const Vec3& center);

SliceSet extract_slices(const Volume3D& vol, const RigidTransform& T,
                        const std::pair<PlaneSpec, PlaneSpec>& layout);

}  // namespace usreg
