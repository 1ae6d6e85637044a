// Acceptance suite: runs every toolkit-level criterion at its stated
// tolerance and prints one PASS/FAIL line per criterion.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "usreg/eval.hpp"
#include "usreg/optimizer.hpp"
#include "usreg/phantom.hpp"
#include "usreg/registration.hpp"
#include "usreg/rng.hpp"
#include "usreg/segmentation.hpp"
#include "usreg/similarity.hpp"

using namespace usreg;
namespace fs = std::filesystem;

namespace {

// Regression baseline for the full-range protocol run (phantom seed 42,
// evaluation seed 7, 60 trials): success percentage measured on the
// reference configuration, pinned with a +/-5 percentage point band.
constexpr double kFullRangeBaselinePct = 83.3;
constexpr double kBaselineBandPct = 5.0;

void verdict(int criterion, bool pass, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str());
  std::fflush(stdout);
  CHECK_MESSAGE(pass, "criterion ", criterion, ": ", what);
}

struct ProtocolRun {
  PhantomResult phantom;
  RoiMask roi;
  DatasetReport report;
  CorrelationExport corr;
};

EvalConfig protocol_config() {
  EvalConfig cfg;
  cfg.n_trials = 60;
  cfg.seed = 7;
  cfg.jobs = 2;
  return cfg;
}

/// Criterion 1/3/4 share this run: default phantom (seed 42), 60 trials
/// at the full perturbation ranges.
const ProtocolRun& full_range_run() {
  static const ProtocolRun run = [] {
    ProtocolRun r;
    PhantomSpec spec;  // 199^3, 0.28 mm, speckle 0.25, seed 42
    r.phantom = generate_phantom(spec);
    r.roi = segment_roi(r.phantom.volume);
    const EvalConfig cfg = protocol_config();
    r.report = run_dataset(r.phantom.volume, r.roi, cfg);
    r.corr = export_correlation(r.report.trials, cfg.criteria);
    return r;
  }();
  return run;
}

}  // namespace

TEST_CASE("criterion 1: full-range protocol reproduction") {
  const ProtocolRun& run = full_range_run();

  bool shaped = run.report.trials.size() == 60;
  const std::string summary = summary_csv(run.report);
  shaped = shaped && summary.find("data_set,success_pct,total_time_s") == 0;
  std::stringstream ss(summary);
  std::string line;
  int rows = 0;
  while (std::getline(ss, line)) rows += line.empty() ? 0 : 1;
  shaped = shaped && rows == 2;  // header + one data-set row

  for (const TrialRecord& t : run.report.trials) {
    for (int k = 0; k < 3; ++k) {
      shaped = shaped && std::abs(t.reference.translation[k]) <=
                             (k == 2 ? 5.0 : 10.0);
      shaped = shaped && std::abs(t.reference.euler_deg[k]) <=
                             (k == 0 ? 6.0 : 12.0);
    }
  }

  const double measured = run.report.success_pct;
  const bool within_band =
      std::abs(measured - kFullRangeBaselinePct) <= kBaselineBandPct;
  std::printf("  measured success: %.1f%% (baseline %.1f%% +/- %.0f)\n",
              measured, kFullRangeBaselinePct, kBaselineBandPct);
  verdict(1, shaped && within_band,
          "60 full-range trials produce a Table-I-shaped report and the "
          "success rate stays on the frozen baseline");
}

TEST_CASE("criterion 2: capture-range recovery on a noise-free phantom") {
  PhantomSpec spec;
  spec.speckle_sigma = 0.0;
  spec.seed = 42;
  const PhantomResult phantom = generate_phantom(spec);
  const RoiMask roi = segment_roi(phantom.volume);

  EvalConfig cfg = protocol_config();
  cfg.ranges.translation_mm = {5.0, 5.0, 5.0};
  cfg.ranges.rotation_deg = {5.0, 5.0, 5.0};

  const auto start = std::chrono::steady_clock::now();
  const DatasetReport report = run_dataset(phantom.volume, roi, cfg);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  std::printf("  %d/60 trials succeeded, %.1f s wall\n", report.success_count,
              elapsed);
  verdict(2,
          report.success_count >= 57 && elapsed < 600.0,
          ">=95% of 60 seeded trials within 5 units succeed in under 10 "
          "minutes");
}

TEST_CASE("criterion 3: high similarity accompanies sub-threshold errors") {
  const ProtocolRun& run = full_range_run();
  const bool one_row_per_trial =
      run.corr.rows.size() == run.report.trials.size();

  std::printf("  %d sub-threshold trials, %.0f%% with NCC >= 0.95\n",
              run.corr.sub_threshold_count,
              100.0 * run.corr.high_ncc_fraction);
  const bool enough = run.corr.sub_threshold_count > 0 &&
                      run.corr.high_ncc_fraction >= 0.90;
  verdict(3, one_row_per_trial && enough,
          "correlation export has one row per trial and >=90% of "
          "sub-1mm/1deg trials have NCC >= 0.95");
}

TEST_CASE("criterion 4: registration time budget") {
  const ProtocolRun& run = full_range_run();
  const double mean = run.report.mean_time_s;
  std::printf("  measured mean registration time: %.2f s\n", mean);
  verdict(4, mean <= 10.0,
          "mean wall time per 199^3 / 2x199^2 registration is <= 10 s");
}

TEST_CASE("criterion 5: ncc oracle equivalence") {
  bool ok = true;

  // Hand case.
  const NccResult hand = ncc_from_pairs(std::array<double, 3>{1, 2, 4},
                                        std::array<double, 3>{1, 2, 3});
  ok = ok && hand.status == NccStatus::ok &&
       std::abs(hand.value - 0.9820) < 1e-4;

  // 100 random masked pairs against the naive oracle.
  Rng rng(505);
  for (int trial = 0; trial < 100 && ok; ++trial) {
    const std::size_t n = 50 + static_cast<std::size_t>(rng.uniform(0, 400));
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t i = 0; i < n; ++i) {
      const bool masked = rng.next_double() < 0.3;
      if (masked) continue;  // the mask decides which pairs participate
      a.push_back(rng.next_double());
      b.push_back(0.2 * a.back() + rng.next_double());
    }
    if (a.size() < 3) continue;
    const NccResult lib = ncc_from_pairs(a, b);
    ok = ok && lib.status == NccStatus::ok &&
         std::abs(lib.value - oracle::naive_ncc(a, b)) < 1e-12;
  }
  verdict(5, ok,
          "library NCC matches the naive implementation within 1e-12 and "
          "the hand case evaluates to ~0.9820");
}

TEST_CASE("criterion 6: otsu matches the exhaustive search exactly") {
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 50 && ok; ++seed) {
    Volume3D vol({17, 13, 11}, {1, 1, 1}, {0, 0, 0});
    Rng rng(seed);
    const bool bimodal = seed % 2 == 0;
    for (auto& v : vol.data) {
      if (bimodal) {
        const double mean = rng.next_double() < 0.5 ? 0.25 : 0.75;
        v = std::clamp(mean + 0.08 * rng.normal(), 0.0, 1.0);
      } else {
        v = rng.next_double();
      }
    }
    ok = ok && otsu_threshold(vol) ==
                   oracle::otsu_bruteforce(oracle::histogram256(vol));
  }
  verdict(6, ok, "otsu equals the 256-threshold exhaustive oracle on 50 "
                 "seeded images, exactly");
}

TEST_CASE("criterion 7: transform algebra group laws") {
  bool ok = true;
  Rng rng(7070);
  for (int i = 0; i < 1000 && ok; ++i) {
    const RigidTransform t = oracle::random_transform(rng);
    const RigidTransform u = oracle::random_transform(rng);

    const RigidTransform id = compose(t, invert(t));
    ok = ok && norm(id.translation) < 1e-9 &&
         std::abs(id.euler_deg.x) < 1e-9 && std::abs(id.euler_deg.y) < 1e-9 &&
         std::abs(id.euler_deg.z) < 1e-9;

    // Matrix homomorphism: matrix(compose(t,u)) == matrix(t)*matrix(u).
    const RigidTransform tu = compose(t, u);
    const Mat3 direct = rotation_matrix(t.euler_deg) *
                        rotation_matrix(u.euler_deg);
    ok = ok && oracle::matrices_close(rotation_matrix(tu.euler_deg), direct,
                                      1e-9);

    const ErrorDecomposition self_err = error_of(t, t);
    ok = ok && self_err.max_abs_translation_mm < 1e-9 &&
         self_err.max_abs_rotation_deg < 1e-9;
  }
  verdict(7, ok,
          "compose/invert group laws hold within 1e-9 on 1000 random "
          "transforms and error_of(T,T) is zero");
}

TEST_CASE("criterion 8: optimizer recovers a 6-D quadratic bowl") {
  bool ok = true;
  Rng rng(808);
  for (int start_idx = 0; start_idx < 20 && ok; ++start_idx) {
    ParamVector target;
    ParamVector start;
    for (int k = 0; k < 6; ++k) {
      target[k] = rng.uniform(-3, 3);
      start[k] = target[k] + rng.uniform(-5, 5);
    }
    const CostFunction bowl = [&target](const ParamVector& p) {
      double s = 0.0;
      for (int k = 0; k < 6; ++k) s += (p[k] - target[k]) * (p[k] - target[k]);
      return s;
    };

    std::vector<double> best_trace;
    const SimplexObserver obs = [&](int, SimplexStep,
                                    const std::vector<ParamVector>&,
                                    const std::vector<double>& costs) {
      best_trace.push_back(costs.front());
    };

    SimplexConfig cfg;
    cfg.x_tol = 1e-6;
    cfg.f_tol = 1e-14;
    cfg.max_evals = 6000;
    const OptResult r = minimize(bowl, start, cfg, obs);

    for (int k = 0; k < 6; ++k) {
      ok = ok && std::abs(r.best_point[k] - target[k]) < 1e-4;
    }
    for (std::size_t i = 1; i < best_trace.size(); ++i) {
      ok = ok && best_trace[i] <= best_trace[i - 1];
    }
  }
  verdict(8, ok,
          "20 seeded starts within 5 units all land within 1e-4 of the "
          "bowl minimum with a monotone best vertex");
}

TEST_CASE("criterion 9: segmentation recall on the noise-free phantom") {
  PhantomSpec spec;
  spec.speckle_sigma = 0.0;
  spec.seed = 42;
  const PhantomResult phantom = generate_phantom(spec);
  const RoiMask roi = segment_roi(phantom.volume);

  std::size_t truth = 0;
  std::size_t covered = 0;
  for (std::size_t i = 0; i < roi.bits.size(); ++i) {
    if (phantom.truth_interface.bits[i]) {
      ++truth;
      covered += roi.bits[i] ? 1 : 0;
    }
  }
  const double recall =
      truth == 0 ? 0.0
                 : static_cast<double>(covered) / static_cast<double>(truth);

  // Dilation monotonicity across radii on the same fusion output.
  SegmentationConfig cfg;
  bool monotone = true;
  RoiMask previous;
  for (int radius = 0; radius <= 3; ++radius) {
    cfg.dilation_radius = radius;
    const RoiMask mask = segment_roi(phantom.volume, cfg);
    if (radius > 0) {
      for (std::size_t i = 0; i < mask.bits.size(); ++i) {
        if (previous.bits[i] && !mask.bits[i]) {
          monotone = false;
          break;
        }
      }
    }
    previous = mask;
  }

  std::printf("  recall %.4f over %zu interface voxels\n", recall, truth);
  verdict(9, recall >= 0.99 && monotone,
          "ROI covers >=99% of the true interface and dilation never "
          "removes voxels");
}

TEST_CASE("criterion 10: evaluate is byte-deterministic modulo wall time") {
  const fs::path base =
      fs::temp_directory_path() / "usreg_acceptance_determinism";
  fs::remove_all(base);
  fs::create_directories(base);

  const std::string cli = USREG_CLI_PATH;
  auto shell = [](const std::string& cmd) {
    return std::system((cmd + " >/dev/null 2>&1").c_str());
  };

  const fs::path ph = base / "phantom";
  const fs::path seg = base / "seg";
  bool ok =
      shell(cli + " phantom --dims 64 --sigma 0.15 --seed 42 --out " +
            ph.string()) == 0;
  ok = ok && shell(cli + " segment --vol " +
                   (ph / "phantom.vol.json").string() + " --out " +
                   seg.string()) == 0;

  const std::string eval_cmd =
      cli + " evaluate --vol " + (ph / "phantom.vol.json").string() +
      " --roi " + (seg / "roi.vol.json").string() +
      " --trials 6 --seed 7 --max-evals 800 --range-t 2 2 1 "
      "--range-r 1 2 2";
  const fs::path e1 = base / "run1";
  const fs::path e2 = base / "run2";
  ok = ok && shell(eval_cmd + " --jobs 1 --out " + e1.string()) == 0;
  ok = ok && shell(eval_cmd + " --jobs 2 --out " + e2.string()) == 0;

  auto filtered = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream filtered_rows;
    std::string line;
    std::getline(in, line);
    std::vector<std::string> headers;
    std::stringstream hs(line);
    std::string h;
    int drop = -1;
    int idx = 0;
    while (std::getline(hs, h, ',')) {
      if (h == "wall_time_s") drop = idx;
      ++idx;
    }
    do {
      if (line.empty()) continue;
      std::stringstream rs(line);
      std::string field;
      int col = 0;
      bool first = true;
      while (std::getline(rs, field, ',')) {
        if (col++ == drop) continue;
        filtered_rows << (first ? "" : ",") << field;
        first = false;
      }
      filtered_rows << "\n";
    } while (std::getline(in, line));
    return filtered_rows.str();
  };

  ok = ok && fs::exists(e1 / "trials.csv") && fs::exists(e2 / "trials.csv");
  if (ok) {
    const std::string a = filtered(e1 / "trials.csv");
    const std::string b = filtered(e2 / "trials.csv");
    ok = a == b && !a.empty();
  }
  verdict(10, ok,
          "two evaluate runs with one seed/config give byte-identical "
          "trials.csv once wall_time is stripped");
}
