#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "usreg/volume.hpp"
#include "usreg/volume_io.hpp"

namespace usreg {

/// Synthetic ultrasound-like bone phantom: speckled soft tissue above a
/// bright interface band, acoustic shadow below, straight parallel beams
/// along +z. The grid is centered on the world origin so the default
/// rotation pivot coincides with the volume center.
struct PhantomSpec {
  IVec3 dims{199, 199, 199};
  Vec3 spacing{0.28, 0.28, 0.28};

  /// Interface surface depth in mm relative to the volume center plane:
  /// offset + tilt plane - elliptic quadratic bump (bump rises toward
  /// the probe, like a bone prominence). Tilts at most ~15 deg keep the
  /// interface "nearly horizontal".
  double surface_offset_mm = 0.0;
  double tilt_x_deg = 4.0;
  double tilt_y_deg = -3.0;
  double bump_amplitude_mm = 5.0;

  double interface_brightness = 0.9;
  int interface_thickness_voxels = 3;
  double soft_tissue_mean = 0.35;
  double shadow_mean = 0.05;

  /// Multiplicative speckle: squared-Gaussian factor with unit mean and
  /// this standard deviation. 0 disables speckle.
  double speckle_sigma = 0.25;

  std::uint64_t seed = 42;

  /// interface_brightness > soft_tissue_mean > shadow_mean, positive
  /// geometry, speckle_sigma in [0, sqrt(2)).
  void validate() const;

  std::string to_json() const;
  static PhantomSpec from_json(const std::string& text);
};

struct PhantomResult {
  Volume3D volume;
  /// Exact set of interface-band voxels, as a mask.
  RoiMask truth_interface;
};

/// Deterministic under spec.seed; the per-voxel speckle stream is keyed
/// on (seed, linear index) so any generation order gives the same bits.
PhantomResult generate_phantom(const PhantomSpec& spec);

}  // namespace usreg
