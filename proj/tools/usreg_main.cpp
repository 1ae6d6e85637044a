// usreg: batch front end for phantom generation, coarse bone-interface
// segmentation, slice-to-volume registration, tracking and protocol
// evaluation. Every run echoes its effective configuration into the
// output directory so results can be reproduced exactly (minus timing).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "usreg/errors.hpp"
#include "usreg/eval.hpp"
#include "usreg/phantom.hpp"
#include "usreg/registration.hpp"
#include "usreg/segmentation.hpp"
#include "usreg/similarity.hpp"
#include "usreg/volume_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace usreg;

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return 2;
    case ErrorCode::io_error: return 3;
    case ErrorCode::malformed_header: return 4;
    case ErrorCode::size_mismatch: return 5;
    case ErrorCode::unsupported_dtype: return 6;
    case ErrorCode::invalid_data: return 7;
    case ErrorCode::degenerate_histogram: return 8;
    case ErrorCode::dimension_mismatch: return 9;
    case ErrorCode::empty_roi: return 10;
    case ErrorCode::invalid_spec: return 11;
    case ErrorCode::non_finite_cost: return 12;
  }
  return 1;
}

struct RunConfig {
  std::string out_dir;
  std::string vol_path;
  std::string roi_path;
  std::string at_path;
  std::string init_path;
  std::string poses_path;
  std::string in_dir;
  std::uint64_t seed = 42;

  // phantom
  std::vector<int> dims{199, 199, 199};
  double spacing_mm = 0.28;
  double surface_offset_mm = 0.0;
  double tilt_x_deg = 4.0;
  double tilt_y_deg = -3.0;
  double bump_amplitude_mm = 5.0;
  double interface_brightness = 0.9;
  int interface_thickness_voxels = 3;
  double soft_tissue_mean = 0.35;
  double shadow_mean = 0.05;
  double speckle_sigma = 0.25;

  // segmentation
  std::string beam_axis = "z";
  int mean_radius = 1;
  int dilation_radius = 2;
  bool smooth_before_sobel = false;
  double edge_response_min = 0.10;

  // optimizer / similarity / registration
  double initial_size_units = 4.0;
  int max_evals = 2000;
  double x_tol = 0.01;
  double f_tol = 1e-5;
  bool restart = true;
  int roi_margin = 32;
  bool no_roi_gating = false;
  int min_samples = 100;
  double success_ncc = 0.95;
  double frame_time_budget_s = 0.0;

  // evaluation
  int trials = 60;
  int jobs = 0;  // 0 = hardware concurrency
  std::string dataset_label = "1";
  std::vector<double> range_translation_mm{10.0, 10.0, 5.0};
  std::vector<double> range_rotation_deg{6.0, 12.0, 12.0};
};

json to_json(const RunConfig& c, const std::string& subcommand) {
  json j;
  j["subcommand"] = subcommand;
  j["out_dir"] = c.out_dir;
  j["vol_path"] = c.vol_path;
  j["roi_path"] = c.roi_path;
  j["at_path"] = c.at_path;
  j["init_path"] = c.init_path;
  j["poses_path"] = c.poses_path;
  j["seed"] = c.seed;
  j["dims"] = c.dims;
  j["spacing_mm"] = c.spacing_mm;
  j["surface_offset_mm"] = c.surface_offset_mm;
  j["tilt_x_deg"] = c.tilt_x_deg;
  j["tilt_y_deg"] = c.tilt_y_deg;
  j["bump_amplitude_mm"] = c.bump_amplitude_mm;
  j["interface_brightness"] = c.interface_brightness;
  j["interface_thickness_voxels"] = c.interface_thickness_voxels;
  j["soft_tissue_mean"] = c.soft_tissue_mean;
  j["shadow_mean"] = c.shadow_mean;
  j["speckle_sigma"] = c.speckle_sigma;
  j["beam_axis"] = c.beam_axis;
  j["mean_radius"] = c.mean_radius;
  j["dilation_radius"] = c.dilation_radius;
  j["smooth_before_sobel"] = c.smooth_before_sobel;
  j["edge_response_min"] = c.edge_response_min;
  j["initial_size_units"] = c.initial_size_units;
  j["max_evals"] = c.max_evals;
  j["x_tol"] = c.x_tol;
  j["f_tol"] = c.f_tol;
  j["restart"] = c.restart;
  j["roi_margin"] = c.roi_margin;
  j["no_roi_gating"] = c.no_roi_gating;
  j["min_samples"] = c.min_samples;
  j["success_ncc"] = c.success_ncc;
  j["frame_time_budget_s"] = c.frame_time_budget_s;
  j["trials"] = c.trials;
  j["jobs"] = c.jobs;
  j["dataset_label"] = c.dataset_label;
  j["range_translation_mm"] = c.range_translation_mm;
  j["range_rotation_deg"] = c.range_rotation_deg;
  return j;
}

void apply_json(const json& j, RunConfig& c) {
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
  };
  get("out_dir", c.out_dir);
  get("vol_path", c.vol_path);
  get("roi_path", c.roi_path);
  get("at_path", c.at_path);
  get("init_path", c.init_path);
  get("poses_path", c.poses_path);
  get("seed", c.seed);
  get("dims", c.dims);
  get("spacing_mm", c.spacing_mm);
  get("surface_offset_mm", c.surface_offset_mm);
  get("tilt_x_deg", c.tilt_x_deg);
  get("tilt_y_deg", c.tilt_y_deg);
  get("bump_amplitude_mm", c.bump_amplitude_mm);
  get("interface_brightness", c.interface_brightness);
  get("interface_thickness_voxels", c.interface_thickness_voxels);
  get("soft_tissue_mean", c.soft_tissue_mean);
  get("shadow_mean", c.shadow_mean);
  get("speckle_sigma", c.speckle_sigma);
  get("beam_axis", c.beam_axis);
  get("mean_radius", c.mean_radius);
  get("dilation_radius", c.dilation_radius);
  get("smooth_before_sobel", c.smooth_before_sobel);
  get("edge_response_min", c.edge_response_min);
  get("initial_size_units", c.initial_size_units);
  get("max_evals", c.max_evals);
  get("x_tol", c.x_tol);
  get("f_tol", c.f_tol);
  get("restart", c.restart);
  get("roi_margin", c.roi_margin);
  get("no_roi_gating", c.no_roi_gating);
  get("min_samples", c.min_samples);
  get("success_ncc", c.success_ncc);
  get("frame_time_budget_s", c.frame_time_budget_s);
  get("trials", c.trials);
  get("jobs", c.jobs);
  get("dataset_label", c.dataset_label);
  get("range_translation_mm", c.range_translation_mm);
  get("range_rotation_deg", c.range_rotation_deg);
}

PhantomSpec phantom_spec_of(const RunConfig& c) {
  PhantomSpec spec;
  if (c.dims.size() == 1) {
    spec.dims = {c.dims[0], c.dims[0], c.dims[0]};
  } else if (c.dims.size() == 3) {
    spec.dims = {c.dims[0], c.dims[1], c.dims[2]};
  } else {
    raise(ErrorCode::invalid_argument, "--dims takes 1 or 3 integers");
  }
  spec.spacing = {c.spacing_mm, c.spacing_mm, c.spacing_mm};
  spec.surface_offset_mm = c.surface_offset_mm;
  spec.tilt_x_deg = c.tilt_x_deg;
  spec.tilt_y_deg = c.tilt_y_deg;
  spec.bump_amplitude_mm = c.bump_amplitude_mm;
  spec.interface_brightness = c.interface_brightness;
  spec.interface_thickness_voxels = c.interface_thickness_voxels;
  spec.soft_tissue_mean = c.soft_tissue_mean;
  spec.shadow_mean = c.shadow_mean;
  spec.speckle_sigma = c.speckle_sigma;
  spec.seed = c.seed;
  return spec;
}

SegmentationConfig segmentation_config_of(const RunConfig& c) {
  SegmentationConfig cfg;
  if (c.beam_axis == "x") {
    cfg.beam_axis = Axis::x;
  } else if (c.beam_axis == "y") {
    cfg.beam_axis = Axis::y;
  } else if (c.beam_axis == "z") {
    cfg.beam_axis = Axis::z;
  } else {
    raise(ErrorCode::invalid_argument, "--beam-axis must be x, y or z");
  }
  cfg.mean_radius = c.mean_radius;
  cfg.dilation_radius = c.dilation_radius;
  cfg.smooth_before_sobel = c.smooth_before_sobel;
  cfg.edge_response_min = c.edge_response_min;
  return cfg;
}

RegistrationConfig registration_config_of(const RunConfig& c) {
  RegistrationConfig cfg;
  cfg.simplex.initial_size_units = c.initial_size_units;
  cfg.simplex.max_evals = c.max_evals;
  cfg.simplex.x_tol = c.x_tol;
  cfg.simplex.f_tol = c.f_tol;
  cfg.simplex.restart = c.restart;
  cfg.roi_margin_voxels = c.roi_margin;
  cfg.ncc.roi_gating = !c.no_roi_gating;
  cfg.ncc.min_samples = static_cast<std::size_t>(c.min_samples);
  cfg.success_ncc = c.success_ncc;
  cfg.frame_time_budget_s = c.frame_time_budget_s;
  return cfg;
}

fs::path ensure_out_dir(const RunConfig& c) {
  if (c.out_dir.empty()) {
    raise(ErrorCode::invalid_argument,
          "no output directory: pass --out or set USREG_OUT_DIR");
  }
  fs::path dir(c.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    raise(ErrorCode::io_error, "cannot create output dir: " + dir.string());
  }
  return dir;
}

void echo_config(const RunConfig& c, const std::string& subcommand,
                 const fs::path& dir) {
  write_file((dir / "effective_config.json").string(),
             to_json(c, subcommand).dump(2) + "\n");
}

RigidTransform load_transform(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::io_error, "cannot open transform: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return transform_from_json(ss.str());
}

int cmd_phantom(const RunConfig& c) {
  const fs::path dir = ensure_out_dir(c);
  const PhantomSpec spec = phantom_spec_of(c);
  const PhantomResult result = generate_phantom(spec);

  save_volume(result.volume, (dir / "phantom.vol.json").string(), "f32");
  save_mask(result.truth_interface, (dir / "truth_mask.vol.json").string());
  write_file((dir / "phantom_spec.json").string(), spec.to_json() + "\n");
  echo_config(c, "phantom", dir);

  std::cout << "phantom: " << spec.dims.x << "x" << spec.dims.y << "x"
            << spec.dims.z << " @ " << spec.spacing.x << " mm, seed "
            << spec.seed << ", interface voxels "
            << result.truth_interface.count() << "\n";
  return 0;
}

int cmd_segment(const RunConfig& c) {
  if (c.vol_path.empty()) {
    raise(ErrorCode::invalid_argument, "segment requires --vol");
  }
  const fs::path dir = ensure_out_dir(c);
  const Volume3D vol = load_volume(c.vol_path);
  const RoiMask roi = segment_roi(vol, segmentation_config_of(c));

  save_mask(roi, (dir / "roi.vol.json").string());
  json stats;
  stats["selected_voxels"] = roi.count();
  stats["selected_fraction"] = roi.fraction();
  stats["empty_flagged"] = roi.empty_flagged;
  write_file((dir / "segment_stats.json").string(), stats.dump(2) + "\n");
  echo_config(c, "segment", dir);

  std::cout << "segment: " << roi.count() << " voxels selected ("
            << 100.0 * roi.fraction() << "% of volume)"
            << (roi.empty_flagged ? " [EMPTY MASK]" : "") << "\n";
  return 0;
}

int cmd_register(const RunConfig& c) {
  if (c.vol_path.empty() || c.roi_path.empty() || c.at_path.empty()) {
    raise(ErrorCode::invalid_argument,
          "register requires --vol, --roi and --at");
  }
  const fs::path dir = ensure_out_dir(c);
  const Volume3D vol = load_volume(c.vol_path);
  const RoiMask roi = load_mask(c.roi_path);
  if (!(roi.dims == vol.dims)) {
    raise(ErrorCode::dimension_mismatch, "ROI dims do not match volume dims");
  }
  const RigidTransform at = load_transform(c.at_path);
  const RigidTransform init = c.init_path.empty()
                                  ? RigidTransform::identity()
                                  : load_transform(c.init_path);

  const SliceSet frame =
      extract_slices(vol, at, default_biplane_layout(vol));
  const RegistrationResult result =
      register_frame(vol, roi, frame, init, registration_config_of(c));

  write_file((dir / "result.jsonl").string(), to_json_line(result) + "\n");
  write_file((dir / "registered_transform.json").string(),
             to_json(result.transform) + "\n");
  echo_config(c, "register", dir);

  std::cout << "register: ncc " << result.ncc << ", evals " << result.evals
            << ", " << result.wall_time_s << " s"
            << (result.converged ? "" : " [not converged]") << "\n";
  return 0;
}

int cmd_track(const RunConfig& c) {
  if (c.vol_path.empty() || c.roi_path.empty() || c.poses_path.empty()) {
    raise(ErrorCode::invalid_argument,
          "track requires --vol, --roi and --poses");
  }
  const fs::path dir = ensure_out_dir(c);
  const Volume3D vol = load_volume(c.vol_path);
  const RoiMask roi = load_mask(c.roi_path);
  if (!(roi.dims == vol.dims)) {
    raise(ErrorCode::dimension_mismatch, "ROI dims do not match volume dims");
  }

  std::ifstream in(c.poses_path);
  if (!in) {
    raise(ErrorCode::io_error, "cannot open poses: " + c.poses_path);
  }
  json poses;
  try {
    in >> poses;
  } catch (const json::exception& e) {
    raise(ErrorCode::malformed_header,
          std::string("poses JSON parse error: ") + e.what());
  }
  if (!poses.is_array() || poses.empty()) {
    raise(ErrorCode::invalid_argument,
          "poses file must be a non-empty JSON array of transforms");
  }

  const auto layout = default_biplane_layout(vol);
  std::vector<SliceSet> frames;
  frames.reserve(poses.size());
  for (const auto& p : poses) {
    frames.push_back(
        extract_slices(vol, transform_from_json(p.dump()), layout));
  }

  const RigidTransform init = c.init_path.empty()
                                  ? RigidTransform::identity()
                                  : load_transform(c.init_path);
  const auto results =
      track_sequence(vol, roi, frames, init, registration_config_of(c));

  std::ostringstream lines;
  int successes = 0;
  for (const auto& r : results) {
    json j = json::parse(to_json_line(r.reg));
    j["success"] = r.success;
    lines << j.dump() << "\n";
    successes += r.success ? 1 : 0;
  }
  write_file((dir / "track_results.jsonl").string(), lines.str());
  echo_config(c, "track", dir);

  std::cout << "track: " << successes << "/" << results.size()
            << " frames successful\n";
  return 0;
}

EvalConfig eval_config_of(const RunConfig& c) {
  EvalConfig cfg;
  cfg.ranges.translation_mm = {c.range_translation_mm.at(0),
                               c.range_translation_mm.at(1),
                               c.range_translation_mm.at(2)};
  cfg.ranges.rotation_deg = {c.range_rotation_deg.at(0),
                             c.range_rotation_deg.at(1),
                             c.range_rotation_deg.at(2)};
  cfg.n_trials = c.trials;
  cfg.seed = c.seed;
  cfg.registration = registration_config_of(c);
  cfg.jobs = c.jobs > 0
                 ? c.jobs
                 : static_cast<int>(std::thread::hardware_concurrency());
  cfg.dataset_label = c.dataset_label;
  return cfg;
}

int cmd_evaluate(const RunConfig& c) {
  if (c.vol_path.empty() || c.roi_path.empty()) {
    raise(ErrorCode::invalid_argument, "evaluate requires --vol and --roi");
  }
  if (c.trials < 1) {
    raise(ErrorCode::invalid_argument, "--trials must be >= 1");
  }
  const fs::path dir = ensure_out_dir(c);
  const Volume3D vol = load_volume(c.vol_path);
  const RoiMask roi = load_mask(c.roi_path);
  if (!(roi.dims == vol.dims)) {
    raise(ErrorCode::dimension_mismatch, "ROI dims do not match volume dims");
  }

  const EvalConfig cfg = eval_config_of(c);
  const DatasetReport report = run_dataset(vol, roi, cfg);
  const CorrelationExport corr =
      export_correlation(report.trials, cfg.criteria);

  write_file((dir / "trials.csv").string(), trials_csv(report));
  write_file((dir / "summary.csv").string(), summary_csv(report));
  write_file((dir / "correlation.csv").string(), correlation_csv(corr));
  echo_config(c, "evaluate", dir);

  std::cout << "evaluate: " << report.success_count << "/"
            << report.trials.size() << " successful ("
            << report.success_pct << "%), total " << report.total_time_s
            << " s, mean " << report.mean_time_s << " s/registration\n";
  return 0;
}

int cmd_report(const RunConfig& c) {
  if (c.in_dir.empty()) {
    raise(ErrorCode::invalid_argument, "report requires --in");
  }
  const fs::path dir(c.in_dir);
  std::ifstream summary(dir / "summary.csv");
  if (!summary) {
    raise(ErrorCode::io_error,
          "cannot open " + (dir / "summary.csv").string());
  }

  std::string header;
  std::getline(summary, header);
  std::cout << "Data Sets    Success (%)    Total Time (s)\n";
  std::string line;
  while (std::getline(summary, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string label, success, total;
    std::getline(ss, label, ',');
    std::getline(ss, success, ',');
    std::getline(ss, total, ',');
    std::printf("%-12s %-14s %s\n", label.c_str(), success.c_str(),
                total.c_str());
  }

  std::ifstream corr(dir / "correlation.csv");
  if (corr) {
    std::getline(corr, header);
    int sub = 0;
    int high = 0;
    while (std::getline(corr, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string f;
      std::vector<std::string> fields;
      while (std::getline(ss, f, ',')) fields.push_back(f);
      if (fields.size() != 5 || fields[4] != "1") continue;
      ++sub;
      if (std::stod(fields[3]) >= 0.95) ++high;
    }
    if (sub > 0) {
      std::printf(
          "Correlation: %d/%d sub-1mm/1deg trials (%.1f%%) have NCC >= "
          "0.95\n",
          high, sub, 100.0 * high / sub);
    } else {
      std::cout << "Correlation: no sub-1mm/1deg trials\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  if (const char* env = std::getenv("USREG_OUT_DIR")) {
    config.out_dir = env;
  }

  // Config file first, flags second, so flags override file values.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      std::ifstream in(argv[i + 1]);
      if (!in) {
        std::cerr << "error: cannot open config file " << argv[i + 1] << "\n";
        return 3;
      }
      try {
        json j;
        in >> j;
        apply_json(j, config);
      } catch (const std::exception& e) {
        std::cerr << "error: bad config file: " << e.what() << "\n";
        return 4;
      }
    }
  }

  CLI::App app{"slice-to-volume rigid registration toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON config file; flags override its values");

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--out", config.out_dir, "output directory");
    cmd->add_option("--seed", config.seed, "RNG seed");
  };

  CLI::App* phantom = app.add_subcommand(
      "phantom", "generate a synthetic bone phantom with ground truth");
  add_common(phantom);
  phantom->add_option("--dims", config.dims, "voxels per axis (1 or 3 ints)");
  phantom->add_option("--spacing", config.spacing_mm, "isotropic mm/voxel");
  phantom->add_option("--surface-offset", config.surface_offset_mm,
                      "interface depth offset, mm");
  phantom->add_option("--tilt-x", config.tilt_x_deg, "interface tilt, deg");
  phantom->add_option("--tilt-y", config.tilt_y_deg, "interface tilt, deg");
  phantom->add_option("--bump", config.bump_amplitude_mm,
                      "quadratic bump amplitude, mm");
  phantom->add_option("--brightness", config.interface_brightness,
                      "interface band intensity");
  phantom->add_option("--thickness", config.interface_thickness_voxels,
                      "interface band thickness, voxels");
  phantom->add_option("--tissue", config.soft_tissue_mean,
                      "soft tissue mean intensity");
  phantom->add_option("--shadow", config.shadow_mean,
                      "acoustic shadow mean intensity");
  phantom->add_option("--sigma", config.speckle_sigma, "speckle sigma");

  CLI::App* segment = app.add_subcommand(
      "segment", "coarse bone-interface segmentation to a ROI mask");
  add_common(segment);
  segment->add_option("--vol", config.vol_path, "volume header (.vol.json)");
  segment->add_option("--beam-axis", config.beam_axis, "beam axis: x|y|z");
  segment->add_option("--mean-radius", config.mean_radius,
                      "box filter radius, voxels");
  segment->add_option("--dilate", config.dilation_radius,
                      "dilation radius (6-connected passes)");
  segment->add_flag("--smooth-before-sobel", config.smooth_before_sobel,
                    "average before the Sobel step instead of after");
  segment->add_option("--edge-min", config.edge_response_min,
                      "minimum smoothed interface response (0 disables)");

  auto add_reg_options = [&](CLI::App* cmd) {
    cmd->add_option("--simplex-size", config.initial_size_units,
                    "initial simplex size, units");
    cmd->add_option("--max-evals", config.max_evals, "evaluation budget");
    cmd->add_option("--x-tol", config.x_tol, "simplex diameter tolerance");
    cmd->add_option("--f-tol", config.f_tol, "cost spread tolerance");
    cmd->add_flag("--restart,!--no-restart", config.restart,
                  "restart once from the best point (default on)");
    cmd->add_option("--roi-margin", config.roi_margin,
                    "extra ROI dilation passes for similarity gating");
    cmd->add_flag("--no-roi-gating", config.no_roi_gating,
                  "score NCC over the whole overlap, not just the ROI");
    cmd->add_option("--min-samples", config.min_samples,
                    "minimum included samples for a valid NCC");
    cmd->add_option("--success-ncc", config.success_ncc,
                    "similarity bar for tracking success");
    cmd->add_option("--time-budget", config.frame_time_budget_s,
                    "per-frame wall time budget, s (0 = none)");
  };

  CLI::App* reg = app.add_subcommand(
      "register", "reslice a frame at a pose and register it back");
  add_common(reg);
  reg->add_option("--vol", config.vol_path, "volume header");
  reg->add_option("--roi", config.roi_path, "ROI mask header");
  reg->add_option("--at", config.at_path,
                  "transform JSON the frame is resliced at");
  reg->add_option("--init", config.init_path, "initial attitude JSON");
  add_reg_options(reg);

  CLI::App* track = app.add_subcommand(
      "track", "track a sequence of frames with warm starts");
  add_common(track);
  track->add_option("--vol", config.vol_path, "volume header");
  track->add_option("--roi", config.roi_path, "ROI mask header");
  track->add_option("--poses", config.poses_path,
                    "JSON array of per-frame reference transforms");
  track->add_option("--init", config.init_path, "initial attitude JSON");
  add_reg_options(track);

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "run the randomized registration evaluation protocol");
  add_common(evaluate);
  evaluate->add_option("--vol", config.vol_path, "volume header");
  evaluate->add_option("--roi", config.roi_path, "ROI mask header");
  evaluate->add_option("--trials", config.trials, "number of trials");
  evaluate->add_option("--jobs", config.jobs,
                       "parallel trial workers (0 = hardware)");
  evaluate->add_option("--label", config.dataset_label, "data set label");
  evaluate->add_option("--range-t", config.range_translation_mm,
                       "translation limits mm (x y z)")
      ->expected(3);
  evaluate->add_option("--range-r", config.range_rotation_deg,
                       "rotation limits deg (x y z)")
      ->expected(3);
  add_reg_options(evaluate);

  CLI::App* report =
      app.add_subcommand("report", "render summary.csv as a text table");
  report->add_option("--in", config.in_dir, "evaluation output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (phantom->parsed()) return cmd_phantom(config);
    if (segment->parsed()) return cmd_segment(config);
    if (reg->parsed()) return cmd_register(config);
    if (track->parsed()) return cmd_track(config);
    if (evaluate->parsed()) return cmd_evaluate(config);
    if (report->parsed()) return cmd_report(config);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
