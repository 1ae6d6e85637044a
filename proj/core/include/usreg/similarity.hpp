#pragma once

#include <span>

#include "usreg/transform.hpp"
#include "usreg/volume.hpp"
#include "usreg/volume_io.hpp"

namespace usreg {

enum class NccStatus {
  ok,
  insufficient_overlap,
  zero_variance,
};

struct NccResult {
  double value = 0.0;
  std::size_t sample_count = 0;
  double overlap_fraction = 0.0;
  NccStatus status = NccStatus::ok;
};

struct NccOptions {
  /// Rotation pivot used to realize the candidate transform.
  Vec3 rotation_center{0, 0, 0};
  /// Gate samples on nearest-voxel ROI membership.
  bool roi_gating = true;
  /// Candidates with fewer included samples score as worst-possible.
  std::size_t min_samples = 100;
};

/// Normalized cross-correlation between the frame intensities A and the
/// reference volume resampled under T, B'(i) = vol(T(q_i)), over samples
/// that are valid in the frame, land inside the volume, and (when gating)
/// whose nearest voxel is in the ROI. Means are taken over the same
/// included set. Summation uses a fixed-tree pairwise reduction so the
/// value is bit-stable regardless of internal evaluation order.
NccResult ncc(const SliceSet& frame, const Volume3D& vol, const RoiMask& roi,
              const RigidTransform& T, const NccOptions& opts = {});

/// The bare NCC formula over two equal-length sample vectors; the
/// building block ncc() reduces to once inclusion is decided.
NccResult ncc_from_pairs(std::span<const double> a, std::span<const double> b,
                         std::size_t min_samples = 0);

/// Deterministic pairwise (fixed-tree) summation.
double pairwise_sum(std::span<const double> values);

}  // namespace usreg
