#include "usreg/phantom.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "usreg/errors.hpp"
#include "usreg/rng.hpp"

namespace usreg {

using nlohmann::json;

void PhantomSpec::validate() const {
  if (dims.x <= 0 || dims.y <= 0 || dims.z <= 0) {
    raise(ErrorCode::invalid_spec, "phantom dims must be positive");
  }
  if (spacing.x <= 0 || spacing.y <= 0 || spacing.z <= 0) {
    raise(ErrorCode::invalid_spec, "phantom spacing must be positive");
  }
  if (!(interface_brightness > soft_tissue_mean &&
        soft_tissue_mean > shadow_mean && shadow_mean >= 0.0)) {
    raise(ErrorCode::invalid_spec,
          "intensity bands must satisfy interface > tissue > shadow >= 0");
  }
  if (interface_brightness > 1.0) {
    raise(ErrorCode::invalid_spec, "interface brightness must be <= 1");
  }
  if (interface_thickness_voxels < 1) {
    raise(ErrorCode::invalid_spec, "interface thickness must be >= 1 voxel");
  }
  if (std::abs(tilt_x_deg) > 15.0 || std::abs(tilt_y_deg) > 15.0) {
    raise(ErrorCode::invalid_spec,
          "interface tilts above 15 deg are not nearly horizontal");
  }
  if (speckle_sigma < 0.0 || speckle_sigma * speckle_sigma >= 2.0) {
    raise(ErrorCode::invalid_spec, "speckle sigma must be in [0, sqrt(2))");
  }
}

namespace {

/// Squared-Gaussian multiplicative speckle factor (m + s*g)^2 with
/// E = m^2 + s^2 = 1 and Var = 2 s^4 + 4 m^2 s^2 = sigma^2.
struct SpeckleModel {
  double m = 1.0;
  double s = 0.0;

  explicit SpeckleModel(double sigma) {
    if (sigma <= 0.0) return;
    const double u = 1.0 - std::sqrt(1.0 - 0.5 * sigma * sigma);
    s = std::sqrt(u);
    m = std::sqrt(1.0 - u);
  }

  double factor(std::uint64_t seed, std::uint64_t voxel) const {
    if (s == 0.0) return 1.0;
    Rng rng(hash_stream(seed, voxel));
    const double g = rng.normal();
    const double r = m + s * g;
    return r * r;
  }
};

}  // namespace

PhantomResult generate_phantom(const PhantomSpec& spec) {
  spec.validate();

  PhantomResult out;
  out.volume = Volume3D(spec.dims, spec.spacing,
                        centered_origin(spec.dims, spec.spacing), 0.0);
  out.truth_interface.dims = spec.dims;
  out.truth_interface.bits.assign(out.volume.data.size(), 0);

  const double sx = std::tan(deg_to_rad(spec.tilt_x_deg));
  const double sy = std::tan(deg_to_rad(spec.tilt_y_deg));
  const double hx = 0.5 * (spec.dims.x - 1) * spec.spacing.x;
  const double hy = 0.5 * (spec.dims.y - 1) * spec.spacing.y;
  const SpeckleModel speckle(spec.speckle_sigma);

  // Bump profile on normalized in-plane coordinates: three smooth lobes
  // of unequal width and height. A single quadratic dome admits
  // near-self-congruences (a lateral slide plus a tilt reproduces it),
  // which leaves rigid registration of a noise-free volume ill-posed;
  // the lobed profile pins all six degrees of freedom.
  const auto bump_profile = [](double u, double v) {
    const auto lobe = [](double du, double dv, double width) {
      return std::exp(-(du * du + dv * dv) / (2.0 * width * width));
    };
    return lobe(u - 0.35, v - 0.20, 0.30) +
           0.6 * lobe(u + 0.40, v + 0.35, 0.38) +
           0.35 * lobe(u - 0.20, v + 0.45, 0.22);
  };

  const Vec3& org = out.volume.origin;
  for (int y = 0; y < spec.dims.y; ++y) {
    const double wy = org.y + y * spec.spacing.y;
    for (int x = 0; x < spec.dims.x; ++x) {
      const double wx = org.x + x * spec.spacing.x;
      const double bump =
          spec.bump_amplitude_mm * bump_profile(wx / hx, wy / hy);
      const double surface_z =
          spec.surface_offset_mm + sx * wx + sy * wy - bump;
      const double ks = (surface_z - org.z) / spec.spacing.z;

      for (int z = 0; z < spec.dims.z; ++z) {
        const std::size_t idx = out.volume.index(x, y, z);
        double v;
        if (z < ks) {
          v = spec.soft_tissue_mean * speckle.factor(spec.seed, idx);
        } else if (z < ks + spec.interface_thickness_voxels) {
          v = spec.interface_brightness;
          out.truth_interface.bits[idx] = 1;
        } else {
          v = spec.shadow_mean * speckle.factor(spec.seed, idx);
        }
        out.volume.data[idx] = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  out.truth_interface.empty_flagged = out.truth_interface.count() == 0;
  return out;
}

std::string PhantomSpec::to_json() const {
  json j;
  j["dims"] = {dims.x, dims.y, dims.z};
  j["spacing_mm"] = {spacing.x, spacing.y, spacing.z};
  j["surface_offset_mm"] = surface_offset_mm;
  j["tilt_x_deg"] = tilt_x_deg;
  j["tilt_y_deg"] = tilt_y_deg;
  j["bump_amplitude_mm"] = bump_amplitude_mm;
  j["interface_brightness"] = interface_brightness;
  j["interface_thickness_voxels"] = interface_thickness_voxels;
  j["soft_tissue_mean"] = soft_tissue_mean;
  j["shadow_mean"] = shadow_mean;
  j["speckle_sigma"] = speckle_sigma;
  j["seed"] = seed;
  return j.dump(2);
}

PhantomSpec PhantomSpec::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    raise(ErrorCode::malformed_header,
          std::string("phantom spec parse error: ") + e.what());
  }
  PhantomSpec spec;
  if (j.contains("dims")) {
    spec.dims = {j["dims"][0].get<int>(), j["dims"][1].get<int>(),
                 j["dims"][2].get<int>()};
  }
  if (j.contains("spacing_mm")) {
    spec.spacing = {j["spacing_mm"][0].get<double>(),
                    j["spacing_mm"][1].get<double>(),
                    j["spacing_mm"][2].get<double>()};
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
  };
  get("surface_offset_mm", spec.surface_offset_mm);
  get("tilt_x_deg", spec.tilt_x_deg);
  get("tilt_y_deg", spec.tilt_y_deg);
  get("bump_amplitude_mm", spec.bump_amplitude_mm);
  get("interface_brightness", spec.interface_brightness);
  get("interface_thickness_voxels", spec.interface_thickness_voxels);
  get("soft_tissue_mean", spec.soft_tissue_mean);
  get("shadow_mean", spec.shadow_mean);
  get("speckle_sigma", spec.speckle_sigma);
  get("seed", spec.seed);
  spec.validate();
  return spec;
}

}  // namespace usreg
