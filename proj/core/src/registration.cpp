#include "usreg/registration.hpp"

#include <chrono>
#include <cmath>

#include <nlohmann/json.hpp>

#include "usreg/errors.hpp"
#include "usreg/segmentation.hpp"

namespace usreg {

namespace {

// Any valid NCC cost lies in [0, 2]; candidates without enough ROI
// overlap (or with degenerate variance) score strictly worse so the
// simplex backs away from them instead of aborting the search.
constexpr double kWorstCost = 3.0;

double elapsed_s(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

RegistrationResult register_frame(const Volume3D& vol, const RoiMask& roi,
                                  const SliceSet& frame,
                                  const RigidTransform& init,
                                  const RegistrationConfig& config) {
  if (config.ncc.roi_gating && roi.count() == 0) {
    raise(ErrorCode::empty_roi, "cannot register against an empty ROI");
  }

  const RoiMask* gate = &roi;
  RoiMask widened;
  if (config.ncc.roi_gating && config.roi_margin_voxels > 0) {
    widened = dilate(roi, config.roi_margin_voxels);
    gate = &widened;
  }

  NccOptions ncc_opts = config.ncc;
  ncc_opts.rotation_center = vol.world_center();

  const auto cost = [&](const ParamVector& p) {
    const NccResult r = ncc(frame, vol, *gate, from_params(p), ncc_opts);
    return r.status == NccStatus::ok ? 1.0 - r.value : kWorstCost;
  };

  const auto start = std::chrono::steady_clock::now();
  const OptResult opt = minimize(cost, to_params(init), config.simplex);

  RegistrationResult result;
  result.transform = canonicalized(from_params(opt.best_point));
  result.evals = opt.evals;

  const NccResult final_ncc =
      ncc(frame, vol, *gate, result.transform, ncc_opts);
  result.ncc = final_ncc.status == NccStatus::ok ? final_ncc.value : -1.0;
  result.converged = opt.termination != TerminationReason::max_evals &&
                     final_ncc.status == NccStatus::ok;
  result.wall_time_s = elapsed_s(start);
  if (config.frame_time_budget_s > 0.0 &&
      result.wall_time_s > config.frame_time_budget_s) {
    result.timed_out = true;
  }
  return result;
}

std::vector<TrackedFrameResult> track_sequence(
    const Volume3D& vol, const RoiMask& roi,
    const std::vector<SliceSet>& frames, const RigidTransform& init,
    const RegistrationConfig& config) {
  if (frames.empty()) {
    raise(ErrorCode::invalid_argument, "track_sequence needs >= 1 frame");
  }

  // Widen the gating mask once for the whole sequence.
  RegistrationConfig frame_config = config;
  const RoiMask* gate = &roi;
  RoiMask widened;
  if (config.ncc.roi_gating && config.roi_margin_voxels > 0 &&
      roi.count() > 0) {
    widened = dilate(roi, config.roi_margin_voxels);
    gate = &widened;
    frame_config.roi_margin_voxels = 0;
  }

  std::vector<TrackedFrameResult> results;
  results.reserve(frames.size());
  RigidTransform attitude = init;

  for (const SliceSet& frame : frames) {
    TrackedFrameResult r;
    r.init_used = attitude;
    try {
      r.reg = register_frame(vol, *gate, frame, attitude, frame_config);
      r.success = r.reg.ncc >= config.success_ncc && !r.reg.timed_out;
    } catch (const Error&) {
      r.success = false;  // recorded as a failed frame, sequence continues
    }
    if (r.success) {
      attitude = r.reg.transform;
    }
    results.push_back(std::move(r));
  }
  return results;
}

std::string to_json_line(const RegistrationResult& r) {
  nlohmann::json j;
  j["t_mm"] = {r.transform.translation.x, r.transform.translation.y,
               r.transform.translation.z};
  j["euler_deg"] = {r.transform.euler_deg.x, r.transform.euler_deg.y,
                    r.transform.euler_deg.z};
  j["ncc"] = r.ncc;
  j["evals"] = r.evals;
  j["wall_time_s"] = r.wall_time_s;
  j["converged"] = r.converged;
  j["timed_out"] = r.timed_out;
  return j.dump();
}

}  // namespace usreg
