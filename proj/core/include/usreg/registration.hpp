#pragma once

#include <string>
#include <vector>

#include "usreg/optimizer.hpp"
#include "usreg/similarity.hpp"
#include "usreg/transform.hpp"
#include "usreg/volume.hpp"
#include "usreg/volume_io.hpp"

namespace usreg {

struct RegistrationConfig {
  /// The optimizer's single-restart option is on for registration; it
  /// rescues the premature simplex collapses that slice-to-volume cost
  /// surfaces provoke.
  SimplexConfig simplex{.restart = true};
  NccOptions ncc{};  // rotation_center is overwritten from the volume
  /// Extra 6-connected dilation passes applied to the ROI before it
  /// gates the similarity. A thin interface mask leaves beam-axis
  /// misalignments beyond the band thickness entirely unscored (every
  /// gated sample is then featureless tissue), which collapses the
  /// beam-axis capture range; widening the working mask restores it.
  int roi_margin_voxels = 32;
  /// Success bar on the similarity value when no ground truth exists.
  double success_ncc = 0.95;
  /// Optional per-frame wall-time budget in seconds; 0 disables it.
  /// A frame exceeding the budget is classified failed-by-timeout.
  double frame_time_budget_s = 0.0;
};

struct RegistrationResult {
  RigidTransform transform;
  double ncc = -1.0;
  int evals = 0;
  double wall_time_s = 0.0;
  bool converged = false;
  bool timed_out = false;
};

/// Minimizes 1 - NCC(frame, vol, roi, from_params(p)) with Nelder-Mead,
/// starting from `init`. Candidates with insufficient ROI overlap or
/// degenerate variance score as worst-possible so the simplex retreats
/// instead of erroring mid-search. Throws on an empty ROI.
RegistrationResult register_frame(const Volume3D& vol, const RoiMask& roi,
                                  const SliceSet& frame,
                                  const RigidTransform& init,
                                  const RegistrationConfig& config = {});

struct TrackedFrameResult {
  RegistrationResult reg;
  RigidTransform init_used;
  bool success = false;
};

/// Sequence tracking with warm starts: frame k starts from the last
/// successful attitude (NCC >= success bar); failures keep the previous
/// attitude for the next frame and never abort the sequence.
std::vector<TrackedFrameResult> track_sequence(
    const Volume3D& vol, const RoiMask& roi,
    const std::vector<SliceSet>& frames, const RigidTransform& init,
    const RegistrationConfig& config = {});

/// One RegistrationResult as a JSON-lines record.
std::string to_json_line(const RegistrationResult& r);

}  // namespace usreg
