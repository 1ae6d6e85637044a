#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "usreg/registration.hpp"
#include "usreg/rng.hpp"
#include "usreg/transform.hpp"
#include "usreg/volume.hpp"
#include "usreg/volume_io.hpp"

namespace usreg {

/// Per-axis uniform perturbation limits. The beam (z) translation is
/// capped tighter than the lateral axes, and rotation about the in-plane
/// x axis tighter than the other two.
struct PerturbationRanges {
  Vec3 translation_mm{10.0, 10.0, 5.0};
  Vec3 rotation_deg{6.0, 12.0, 12.0};

  void validate() const;
};

/// One evaluation trial. success requires NCC > 0.95 and every residual
/// strictly below 1 mm / 1 degree.
struct TrialRecord {
  int trial = 0;
  RigidTransform reference;
  RigidTransform registration;
  ErrorDecomposition error;
  double ncc = -1.0;
  int evals = 0;
  double wall_time_s = 0.0;
  bool success = false;
};

struct SuccessCriteria {
  double min_ncc = 0.95;          // strictly greater
  double max_translation_mm = 1.0;  // strictly less
  double max_rotation_deg = 1.0;    // strictly less
};

bool is_success(const TrialRecord& r, const SuccessCriteria& c = {});

struct EvalConfig {
  PerturbationRanges ranges{};
  int n_trials = 60;
  std::uint64_t seed = 7;
  RegistrationConfig registration{};
  SuccessCriteria criteria{};
  int jobs = 1;
  std::string dataset_label = "1";
};

/// Uniform independent draw of the six parameters within the ranges,
/// from a stream owned by the caller.
RigidTransform sample_reference_transform(const PerturbationRanges& ranges,
                                          Rng& rng);

/// Draws T_reference (stream keyed on (seed, trial)), reslices the two
/// orthogonal planes at it, registers from identity, and fills the
/// record. Registration errors become failed trials, never aborts.
TrialRecord run_trial(const Volume3D& vol, const RoiMask& roi, int trial,
                      const EvalConfig& config);

struct DatasetReport {
  std::string dataset_label;
  std::vector<TrialRecord> trials;
  int success_count = 0;
  double success_pct = 0.0;
  double total_time_s = 0.0;
  double mean_time_s = 0.0;
};

/// n_trials independent trials; deterministic given (seed, config)
/// regardless of the parallelism level because each trial owns its
/// RNG stream.
DatasetReport run_dataset(const Volume3D& vol, const RoiMask& roi,
                          const EvalConfig& config);

struct CorrelationRow {
  int trial = 0;
  double max_abs_translation_mm = 0.0;
  double max_abs_rotation_deg = 0.0;
  double ncc = -1.0;
  bool sub_threshold_error = false;
};

struct CorrelationExport {
  std::vector<CorrelationRow> rows;
  /// Among sub-threshold-error trials, the fraction with NCC in [0.95, 1].
  double high_ncc_fraction = 0.0;
  int sub_threshold_count = 0;
};

CorrelationExport export_correlation(const std::vector<TrialRecord>& records,
                                     const SuccessCriteria& criteria = {});

/// CSV emitters; all floats use 6 significant digits. Column orders are
/// documented in the README.
std::string trials_csv(const DatasetReport& report);
std::string summary_csv(const DatasetReport& report);
std::string correlation_csv(const CorrelationExport& corr);

void write_file(const std::string& path, const std::string& content);

}  // namespace usreg
