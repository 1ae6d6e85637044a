#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "usreg/errors.hpp"
#include "usreg/eval.hpp"
#include "usreg/phantom.hpp"
#include "usreg/segmentation.hpp"

using namespace usreg;

namespace {

TrialRecord record_with(double ncc, double max_t, double max_r) {
  TrialRecord r;
  r.ncc = ncc;
  r.error.max_abs_translation_mm = max_t;
  r.error.max_abs_rotation_deg = max_r;
  r.success = is_success(r);
  return r;
}

std::string strip_column(const std::string& csv, const std::string& name) {
  std::stringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> headers;
  {
    std::stringstream hs(line);
    std::string h;
    while (std::getline(hs, h, ',')) headers.push_back(h);
  }
  int drop = -1;
  for (std::size_t i = 0; i < headers.size(); ++i) {
    if (headers[i] == name) drop = static_cast<int>(i);
  }
  REQUIRE(drop >= 0);

  std::ostringstream out;
  auto emit = [&](const std::string& row) {
    std::stringstream rs(row);
    std::string field;
    int idx = 0;
    bool first = true;
    while (std::getline(rs, field, ',')) {
      if (idx++ == drop) continue;
      out << (first ? "" : ",") << field;
      first = false;
    }
    out << "\n";
  };
  emit(line);
  while (std::getline(in, line)) {
    if (!line.empty()) emit(line);
  }
  return out.str();
}

}  // namespace

TEST_CASE("zero ranges draw the identity") {
  PerturbationRanges ranges;
  ranges.translation_mm = {0, 0, 0};
  ranges.rotation_deg = {0, 0, 0};
  Rng rng(1);
  const RigidTransform t = sample_reference_transform(ranges, rng);
  CHECK(norm(t.translation) == 0.0);
  CHECK(norm(t.euler_deg) == 0.0);
}

TEST_CASE("draws respect the per-axis limits and center on zero") {
  const PerturbationRanges ranges;  // (10,10,5) mm, (6,12,12) deg
  Rng rng(2);
  Vec3 t_min{1e9, 1e9, 1e9};
  Vec3 t_max{-1e9, -1e9, -1e9};
  Vec3 t_sum{0, 0, 0};
  Vec3 r_sum{0, 0, 0};
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const RigidTransform t = sample_reference_transform(ranges, rng);
    for (int k = 0; k < 3; ++k) {
      t_min[k] = std::min(t_min[k], t.translation[k]);
      t_max[k] = std::max(t_max[k], t.translation[k]);
      t_sum[k] += t.translation[k];
      r_sum[k] += t.euler_deg[k];
      CHECK(std::abs(t.translation[k]) <= ranges.translation_mm[k]);
      CHECK(std::abs(t.euler_deg[k]) <= ranges.rotation_deg[k]);
    }
  }
  // Beam-axis translation never exceeds 5 mm.
  CHECK(t_max.z <= 5.0);
  CHECK(t_min.z >= -5.0);
  // Means within 5% of the range width of zero.
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(t_sum[k] / n) < 0.05 * 2.0 * ranges.translation_mm[k]);
    CHECK(std::abs(r_sum[k] / n) < 0.05 * 2.0 * ranges.rotation_deg[k]);
    // The draws actually reach toward the limits.
    CHECK(t_max[k] > 0.9 * ranges.translation_mm[k]);
    CHECK(t_min[k] < -0.9 * ranges.translation_mm[k]);
  }
}

TEST_CASE("beam limit above lateral limits is rejected") {
  PerturbationRanges ranges;
  ranges.translation_mm = {4.0, 4.0, 6.0};
  CHECK_THROWS_AS(ranges.validate(), Error);
}

TEST_CASE("success requires both criteria, strictly") {
  CHECK(record_with(0.96, 0.4, 0.2).success);
  CHECK_FALSE(record_with(0.99, 2.0, 0.2).success);   // residual too large
  CHECK_FALSE(record_with(0.90, 0.4, 0.2).success);   // similarity too low
  CHECK_FALSE(record_with(0.95, 0.4, 0.2).success);   // bar is strict
  CHECK_FALSE(record_with(0.96, 1.0, 0.2).success);   // bar is strict
  CHECK_FALSE(record_with(0.96, 0.4, 1.0).success);   // bar is strict
  CHECK(record_with(0.950001, 0.999, 0.999).success);
}

struct EvalFixture {
  PhantomResult phantom;
  RoiMask roi;

  EvalFixture() {
    PhantomSpec spec;
    spec.dims = {64, 64, 64};
    spec.speckle_sigma = 0.15;
    spec.seed = 42;
    phantom = generate_phantom(spec);
    roi = segment_roi(phantom.volume);
  }
};

TEST_CASE("a zero-range trial succeeds with tiny residuals") {
  const EvalFixture fx;
  EvalConfig cfg;
  cfg.ranges.translation_mm = {0, 0, 0};
  cfg.ranges.rotation_deg = {0, 0, 0};
  cfg.registration.simplex.max_evals = 1200;
  const TrialRecord r = run_trial(fx.phantom.volume, fx.roi, 0, cfg);
  CHECK(r.success);
  CHECK(r.ncc > 0.99);
  CHECK(r.error.max_abs_translation_mm < 0.1);
  CHECK(r.error.max_abs_rotation_deg < 0.1);
}

TEST_CASE("run_dataset aggregates and stays deterministic across jobs") {
  const EvalFixture fx;
  EvalConfig cfg;
  cfg.n_trials = 4;
  cfg.seed = 7;
  cfg.ranges.translation_mm = {2.0, 2.0, 1.0};
  cfg.ranges.rotation_deg = {1.0, 2.0, 2.0};
  cfg.registration.simplex.max_evals = 800;
  cfg.jobs = 1;
  const DatasetReport serial = run_dataset(fx.phantom.volume, fx.roi, cfg);
  cfg.jobs = 4;
  const DatasetReport parallel = run_dataset(fx.phantom.volume, fx.roi, cfg);

  REQUIRE(serial.trials.size() == 4);
  REQUIRE(parallel.trials.size() == 4);
  CHECK(serial.success_count == parallel.success_count);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(serial.trials[i].ncc == parallel.trials[i].ncc);
    CHECK(serial.trials[i].evals == parallel.trials[i].evals);
    for (int k = 0; k < 3; ++k) {
      CHECK(serial.trials[i].reference.translation[k] ==
            parallel.trials[i].reference.translation[k]);
      CHECK(serial.trials[i].registration.translation[k] ==
            parallel.trials[i].registration.translation[k]);
    }
  }
  CHECK(serial.success_pct ==
        doctest::Approx(100.0 * serial.success_count / 4.0));
  const double sum = serial.trials[0].wall_time_s +
                     serial.trials[1].wall_time_s +
                     serial.trials[2].wall_time_s +
                     serial.trials[3].wall_time_s;
  CHECK(serial.total_time_s == doctest::Approx(sum));
}

TEST_CASE("trials csv is byte-identical across runs modulo wall time") {
  const EvalFixture fx;
  EvalConfig cfg;
  cfg.n_trials = 3;
  cfg.seed = 11;
  cfg.ranges.translation_mm = {1.0, 1.0, 0.5};
  cfg.ranges.rotation_deg = {0.5, 1.0, 1.0};
  cfg.registration.simplex.max_evals = 600;
  const std::string csv_a =
      trials_csv(run_dataset(fx.phantom.volume, fx.roi, cfg));
  const std::string csv_b =
      trials_csv(run_dataset(fx.phantom.volume, fx.roi, cfg));
  CHECK(strip_column(csv_a, "wall_time_s") ==
        strip_column(csv_b, "wall_time_s"));
}

TEST_CASE("correlation export has one row per trial") {
  std::vector<TrialRecord> records;
  records.push_back(record_with(0.99, 0.1, 0.1));
  records.push_back(record_with(0.80, 3.0, 2.0));
  records.push_back(record_with(0.97, 0.5, 0.4));
  records[0].trial = 0;
  records[1].trial = 1;
  records[2].trial = 2;

  const CorrelationExport corr = export_correlation(records);
  REQUIRE(corr.rows.size() == 3);
  CHECK(corr.sub_threshold_count == 2);
  CHECK(corr.high_ncc_fraction == doctest::Approx(1.0));
  CHECK(corr.rows[1].sub_threshold_error == false);

  const std::string csv = correlation_csv(corr);
  int lines = 0;
  for (char c : csv) lines += c == '\n' ? 1 : 0;
  CHECK(lines == 4);  // header + 3 rows
}

TEST_CASE("all-perfect records give a perfect correlation fraction") {
  std::vector<TrialRecord> records(5, record_with(0.999, 0.01, 0.01));
  const CorrelationExport corr = export_correlation(records);
  CHECK(corr.sub_threshold_count == 5);
  CHECK(corr.high_ncc_fraction == doctest::Approx(1.0));
  for (const auto& row : corr.rows) {
    CHECK(row.ncc >= 0.999);
    CHECK(row.max_abs_translation_mm <= 0.01);
  }
}

TEST_CASE("export_correlation rejects an empty record list") {
  CHECK_THROWS_AS(export_correlation({}), Error);
}

TEST_CASE("csv floats use six significant digits") {
  DatasetReport report;
  report.dataset_label = "1";
  TrialRecord r = record_with(0.123456789, 0.987654321, 0.5);
  r.reference.translation = {1.23456789, 0, 0};
  r.wall_time_s = 3.14159265;
  report.trials.push_back(r);
  report.success_pct = 66.6666666;
  report.total_time_s = 123.456789;
  report.mean_time_s = 12.3456789;

  const std::string csv = trials_csv(report);
  CHECK(csv.find("1.23457") != std::string::npos);
  CHECK(csv.find("0.123457") != std::string::npos);
  CHECK(csv.find("3.14159") != std::string::npos);

  const std::string sum = summary_csv(report);
  CHECK(sum.find("66.6667") != std::string::npos);
  CHECK(sum.find("123.457") != std::string::npos);
}

TEST_CASE("summary csv mirrors the report table shape") {
  DatasetReport report;
  report.dataset_label = "2";
  report.trials.resize(60);
  report.success_count = 41;
  report.success_pct = 100.0 * 41 / 60;
  report.total_time_s = 700.0;
  report.mean_time_s = 700.0 / 60;
  const std::string csv = summary_csv(report);
  std::stringstream ss(csv);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  CHECK(header ==
        "data_set,success_pct,total_time_s,mean_time_s,trials");
  CHECK(row.substr(0, 2) == "2,");
  CHECK(row.find("68.3333") != std::string::npos);
  CHECK(row.find("700") != std::string::npos);
}
