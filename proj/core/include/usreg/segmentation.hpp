#pragma once

#include "usreg/volume.hpp"
#include "usreg/volume_io.hpp"

namespace usreg {

enum class Axis { x = 0, y = 1, z = 2 };

/// Otsu threshold level in [0,1] over a 256-bin histogram: the bin
/// boundary maximizing between-class variance, lowest level on ties.
/// Throws ErrorCode::degenerate_histogram when every voxel falls in one
/// bin.
double otsu_threshold(const Volume3D& vol);

/// 3x3 Sobel derivative along the beam (depth) axis, applied slice-wise
/// on the 2-D planes spanned by the beam axis and the first lateral axis,
/// with edge replication. The response is signed and normalized so a
/// unit intensity step along the beam gives |response| = 1; positive
/// means intensity increasing with depth (the bright top edge of a bone
/// interface). The segmentation pipeline keeps only the positive side.
Volume3D sobel_depth(const Volume3D& vol, Axis beam_axis);

/// Box average over the (2r+1)^3 neighborhood with edge replication.
Volume3D mean_filter(const Volume3D& vol, int radius);

/// Marks voxels whose value is strictly greater than both neighbors
/// along the beam axis; boundary voxels compare against their single
/// neighbor. Plateau voxels are never marked.
std::vector<std::uint8_t> beam_local_maxima(const Volume3D& vol,
                                            Axis beam_axis);

/// mask = (smoothed > threshold) AND maxima, then `dilation_radius`
/// passes of 6-connected dilation. Flags (rather than errors) an empty
/// fusion result.
RoiMask fuse_and_dilate(const Volume3D& smoothed, double threshold,
                        const std::vector<std::uint8_t>& maxima,
                        int dilation_radius);

/// `radius` passes of 6-connected morphological dilation.
RoiMask dilate(const RoiMask& mask, int radius);

struct SegmentationConfig {
  Axis beam_axis = Axis::z;
  int mean_radius = 1;
  int dilation_radius = 2;
  /// Default order follows the pipeline step numbering: Sobel on the raw
  /// volume, averaging after. The alternative smooths first.
  bool smooth_before_sobel = false;
  /// Interface gate: require the smoothed positive Sobel response to
  /// exceed this level at a candidate maximum. 0 disables the gate.
  double edge_response_min = 0.10;
};

/// Full coarse-segmentation pipeline: Otsu threshold on the raw volume,
/// depth Sobel, averaging, then fusion (smoothed intensity above the
/// threshold, beam-maximum membership, positive interface response) and
/// dilation.
RoiMask segment_roi(const Volume3D& vol, const SegmentationConfig& config = {});

}  // namespace usreg
