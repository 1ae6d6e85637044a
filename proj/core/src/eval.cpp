#include "usreg/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "usreg/errors.hpp"
#include "usreg/segmentation.hpp"

namespace usreg {

void PerturbationRanges::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (translation_mm[i] < 0.0 || rotation_deg[i] < 0.0) {
      raise(ErrorCode::invalid_argument,
            "perturbation limits must be non-negative");
    }
  }
  if (translation_mm.z > translation_mm.x ||
      translation_mm.z > translation_mm.y) {
    raise(ErrorCode::invalid_argument,
          "beam-axis translation limit must not exceed the lateral limits");
  }
}

bool is_success(const TrialRecord& r, const SuccessCriteria& c) {
  return r.ncc > c.min_ncc &&
         r.error.max_abs_translation_mm < c.max_translation_mm &&
         r.error.max_abs_rotation_deg < c.max_rotation_deg;
}

RigidTransform sample_reference_transform(const PerturbationRanges& ranges,
                                          Rng& rng) {
  ranges.validate();
  RigidTransform t;
  for (int i = 0; i < 3; ++i) {
    const double lim = ranges.translation_mm[i];
    t.translation[i] = lim == 0.0 ? 0.0 : rng.uniform(-lim, lim);
  }
  for (int i = 0; i < 3; ++i) {
    const double lim = ranges.rotation_deg[i];
    t.euler_deg[i] = lim == 0.0 ? 0.0 : rng.uniform(-lim, lim);
  }
  return t;
}

TrialRecord run_trial(const Volume3D& vol, const RoiMask& roi, int trial,
                      const EvalConfig& config) {
  TrialRecord record;
  record.trial = trial;

  Rng rng(hash_stream(config.seed, static_cast<std::uint64_t>(trial)));
  record.reference = sample_reference_transform(config.ranges, rng);

  const auto layout = default_biplane_layout(vol);
  const SliceSet frame = extract_slices(vol, record.reference, layout);

  try {
    const RegistrationResult reg = register_frame(
        vol, roi, frame, RigidTransform::identity(), config.registration);
    record.registration = reg.transform;
    record.ncc = reg.ncc;
    record.evals = reg.evals;
    record.wall_time_s = reg.wall_time_s;
    record.error = error_of(record.reference, record.registration);
    record.success = is_success(record, config.criteria) && !reg.timed_out;
  } catch (const Error&) {
    // A registration failure is a failed trial, not an aborted run.
    record.registration = RigidTransform::identity();
    record.error = error_of(record.reference, record.registration);
    record.ncc = -1.0;
    record.success = false;
  }
  return record;
}

DatasetReport run_dataset(const Volume3D& vol, const RoiMask& roi,
                          const EvalConfig& config) {
  if (config.n_trials < 1) {
    raise(ErrorCode::invalid_argument, "n_trials must be >= 1");
  }
  config.ranges.validate();

  DatasetReport report;
  report.dataset_label = config.dataset_label;
  report.trials.resize(static_cast<std::size_t>(config.n_trials));

  // Widen the gating mask once rather than once per trial.
  EvalConfig trial_config = config;
  const RoiMask* gate = &roi;
  RoiMask widened;
  if (config.registration.ncc.roi_gating &&
      config.registration.roi_margin_voxels > 0 && roi.count() > 0) {
    widened = dilate(roi, config.registration.roi_margin_voxels);
    gate = &widened;
    trial_config.registration.roi_margin_voxels = 0;
  }

  const int jobs =
      std::max(1, std::min(config.jobs, config.n_trials));
  if (jobs == 1) {
    for (int t = 0; t < config.n_trials; ++t) {
      report.trials[static_cast<std::size_t>(t)] =
          run_trial(vol, *gate, t, trial_config);
    }
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int t = next.fetch_add(1);
        if (t >= config.n_trials) break;
        report.trials[static_cast<std::size_t>(t)] =
            run_trial(vol, *gate, t, trial_config);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (const TrialRecord& r : report.trials) {
    report.success_count += r.success ? 1 : 0;
    report.total_time_s += r.wall_time_s;
  }
  report.success_pct =
      100.0 * report.success_count / static_cast<double>(config.n_trials);
  report.mean_time_s = report.total_time_s / config.n_trials;
  return report;
}

CorrelationExport export_correlation(const std::vector<TrialRecord>& records,
                                     const SuccessCriteria& criteria) {
  if (records.empty()) {
    raise(ErrorCode::invalid_argument,
          "correlation export needs >= 1 record");
  }
  CorrelationExport out;
  out.rows.reserve(records.size());
  int high_ncc = 0;
  for (const TrialRecord& r : records) {
    CorrelationRow row;
    row.trial = r.trial;
    row.max_abs_translation_mm = r.error.max_abs_translation_mm;
    row.max_abs_rotation_deg = r.error.max_abs_rotation_deg;
    row.ncc = r.ncc;
    row.sub_threshold_error =
        r.error.max_abs_translation_mm < criteria.max_translation_mm &&
        r.error.max_abs_rotation_deg < criteria.max_rotation_deg;
    if (row.sub_threshold_error) {
      ++out.sub_threshold_count;
      if (r.ncc >= criteria.min_ncc && r.ncc <= 1.0 + 1e-12) ++high_ncc;
    }
    out.rows.push_back(row);
  }
  out.high_ncc_fraction =
      out.sub_threshold_count == 0
          ? 0.0
          : static_cast<double>(high_ncc) / out.sub_threshold_count;
  return out;
}

namespace {

std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string trials_csv(const DatasetReport& report) {
  std::ostringstream os;
  os << "trial,ref_tx_mm,ref_ty_mm,ref_tz_mm,ref_rx_deg,ref_ry_deg,ref_rz_deg,"
        "reg_tx_mm,reg_ty_mm,reg_tz_mm,reg_rx_deg,reg_ry_deg,reg_rz_deg,"
        "err_tx_mm,err_ty_mm,err_tz_mm,err_rx_deg,err_ry_deg,err_rz_deg,"
        "max_err_trans_mm,max_err_rot_deg,err_trans_norm_mm,"
        "err_rot_geodesic_deg,ncc,evals,wall_time_s,success\n";
  for (const TrialRecord& r : report.trials) {
    os << r.trial;
    for (int i = 0; i < 3; ++i) os << ',' << g6(r.reference.translation[i]);
    for (int i = 0; i < 3; ++i) os << ',' << g6(r.reference.euler_deg[i]);
    for (int i = 0; i < 3; ++i) os << ',' << g6(r.registration.translation[i]);
    for (int i = 0; i < 3; ++i) os << ',' << g6(r.registration.euler_deg[i]);
    for (int i = 0; i < 3; ++i) os << ',' << g6(r.error.translation_mm[i]);
    for (int i = 0; i < 3; ++i) os << ',' << g6(r.error.rotation_deg[i]);
    os << ',' << g6(r.error.max_abs_translation_mm) << ','
       << g6(r.error.max_abs_rotation_deg) << ','
       << g6(r.error.translation_norm_mm) << ','
       << g6(r.error.geodesic_rotation_deg) << ',' << g6(r.ncc) << ','
       << r.evals << ',' << g6(r.wall_time_s) << ','
       << (r.success ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string summary_csv(const DatasetReport& report) {
  std::ostringstream os;
  os << "data_set,success_pct,total_time_s,mean_time_s,trials\n";
  os << report.dataset_label << ',' << g6(report.success_pct) << ','
     << g6(report.total_time_s) << ',' << g6(report.mean_time_s) << ','
     << report.trials.size() << '\n';
  return os.str();
}

std::string correlation_csv(const CorrelationExport& corr) {
  std::ostringstream os;
  os << "trial,max_err_trans_mm,max_err_rot_deg,ncc,sub_threshold_error\n";
  for (const CorrelationRow& r : corr.rows) {
    os << r.trial << ',' << g6(r.max_abs_translation_mm) << ','
       << g6(r.max_abs_rotation_deg) << ',' << g6(r.ncc) << ','
       << (r.sub_threshold_error ? 1 : 0) << '\n';
  }
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) {
    raise(ErrorCode::io_error, "cannot write: " + path);
  }
  out << content;
}

}  // namespace usreg
