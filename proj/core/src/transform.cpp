#include "usreg/transform.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "usreg/errors.hpp"

namespace usreg {

namespace {

Mat3 axis_rotation(int axis, double deg) {
  const double r = deg_to_rad(deg);
  const double c = std::cos(r);
  const double s = std::sin(r);
  Mat3 m;
  switch (axis) {
    case 0:
      m(1, 1) = c; m(1, 2) = -s;
      m(2, 1) = s; m(2, 2) = c;
      break;
    case 1:
      m(0, 0) = c; m(0, 2) = s;
      m(2, 0) = -s; m(2, 2) = c;
      break;
    default:
      m(0, 0) = c; m(0, 1) = -s;
      m(1, 0) = s; m(1, 1) = c;
      break;
  }
  return m;
}

}  // namespace

Mat3 rotation_matrix(const Vec3& euler_deg) {
  // Fixed-axis X then Y then Z: later rotations premultiply.
  return axis_rotation(2, euler_deg.z) *
         (axis_rotation(1, euler_deg.y) * axis_rotation(0, euler_deg.x));
}

Vec3 euler_from_matrix(const Mat3& r) {
  // R = Rz Ry Rx gives R(2,0) = -sin(ry).
  const double sy = -r(2, 0);
  const double clamped = std::clamp(sy, -1.0, 1.0);
  const double ry = std::asin(clamped);

  double rx;
  double rz;
  if (std::abs(clamped) < 1.0 - 1e-12) {
    rx = std::atan2(r(2, 1), r(2, 2));
    rz = std::atan2(r(1, 0), r(0, 0));
  } else {
    // Gimbal lock: pin rz = 0 and fold everything into rx.
    rz = 0.0;
    if (clamped > 0.0) {
      rx = std::atan2(r(0, 1), r(0, 2));
    } else {
      rx = std::atan2(-r(0, 1), -r(0, 2));
    }
  }
  return {rad_to_deg(rx), rad_to_deg(ry), rad_to_deg(rz)};
}

double canonical_angle_deg(double deg) {
  double a = std::fmod(deg, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

RigidTransform canonicalized(const RigidTransform& t) {
  RigidTransform c = t;
  c.euler_deg = {canonical_angle_deg(t.euler_deg.x),
                 canonical_angle_deg(t.euler_deg.y),
                 canonical_angle_deg(t.euler_deg.z)};
  return c;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  const Mat3 ra = rotation_matrix(a.euler_deg);
  const Mat3 rb = rotation_matrix(b.euler_deg);
  const Mat3 r = ra * rb;
  const Vec3 t = ra * b.translation + a.translation;
  return canonicalized({t, euler_from_matrix(r)});
}

RigidTransform invert(const RigidTransform& t) {
  const Mat3 rt = rotation_matrix(t.euler_deg).transposed();
  const Vec3 ti = -1.0 * (rt * t.translation);
  return canonicalized({ti, euler_from_matrix(rt)});
}

WorldMap world_map(const RigidTransform& t, const Vec3& pivot) {
  WorldMap m;
  m.rotation = rotation_matrix(t.euler_deg);
  m.offset = pivot + t.translation - m.rotation * pivot;
  return m;
}

ErrorDecomposition error_of(const RigidTransform& t_reference,
                            const RigidTransform& t_registration) {
  const RigidTransform err = compose(invert(t_reference), t_registration);
  ErrorDecomposition d;
  d.translation_mm = err.translation;
  d.rotation_deg = err.euler_deg;
  d.abs_translation_mm = {std::abs(err.translation.x),
                          std::abs(err.translation.y),
                          std::abs(err.translation.z)};
  d.abs_rotation_deg = {std::abs(err.euler_deg.x), std::abs(err.euler_deg.y),
                        std::abs(err.euler_deg.z)};
  d.max_abs_translation_mm =
      std::max({d.abs_translation_mm.x, d.abs_translation_mm.y,
                d.abs_translation_mm.z});
  d.max_abs_rotation_deg = std::max(
      {d.abs_rotation_deg.x, d.abs_rotation_deg.y, d.abs_rotation_deg.z});
  d.translation_norm_mm = norm(err.translation);
  const double ct =
      std::clamp((trace(rotation_matrix(err.euler_deg)) - 1.0) * 0.5, -1.0, 1.0);
  d.geodesic_rotation_deg = rad_to_deg(std::acos(ct));
  return d;
}

ParamVector to_params(const RigidTransform& t) {
  return {t.translation.x, t.translation.y, t.translation.z,
          t.euler_deg.x,   t.euler_deg.y,   t.euler_deg.z};
}

RigidTransform from_params(const ParamVector& p) {
  return {{p[0], p[1], p[2]}, {p[3], p[4], p[5]}};
}

std::string to_json(const RigidTransform& t) {
  nlohmann::json j;
  j["t_mm"] = {t.translation.x, t.translation.y, t.translation.z};
  j["euler_deg"] = {t.euler_deg.x, t.euler_deg.y, t.euler_deg.z};
  j["convention"] = "XYZ-fixed-center";
  return j.dump(2);
}

RigidTransform transform_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::malformed_header,
          std::string("transform JSON parse error: ") + e.what());
  }
  if (!j.contains("t_mm") || !j.contains("euler_deg")) {
    raise(ErrorCode::malformed_header,
          "transform JSON needs t_mm and euler_deg");
  }
  const auto t = j["t_mm"];
  const auto e = j["euler_deg"];
  if (t.size() != 3 || e.size() != 3) {
    raise(ErrorCode::malformed_header,
          "transform JSON t_mm/euler_deg must have 3 entries");
  }
  if (j.contains("convention") && j["convention"] != "XYZ-fixed-center") {
    raise(ErrorCode::unsupported_dtype,
          "unsupported transform convention: " +
              j["convention"].get<std::string>());
  }
  return canonicalized(
      {{t[0].get<double>(), t[1].get<double>(), t[2].get<double>()},
       {e[0].get<double>(), e[1].get<double>(), e[2].get<double>()}});
}

}  // namespace usreg
