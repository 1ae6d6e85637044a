#pragma once

#include <array>
#include <string>

#include "usreg/geometry.hpp"

namespace usreg {

/// 6-DOF rigid motion: translation in mm plus three fixed-axis Euler
/// angles in degrees, applied X then Y then Z (R = Rz * Ry * Rx).
/// Angles are kept canonical in (-180, 180].
///
/// The rotation pivot is not part of the value: composition, inversion
/// and error decomposition are pivot-independent, so the algebra here
/// works about the origin and the pivot (normally the volume center) is
/// supplied where a transform is realized as a world map.
struct RigidTransform {
  Vec3 translation{0, 0, 0};  // mm
  Vec3 euler_deg{0, 0, 0};    // degrees, X/Y/Z fixed axes

  static RigidTransform identity() { return {}; }
  static RigidTransform translate(double x, double y, double z) {
    return {{x, y, z}, {0, 0, 0}};
  }
  static RigidTransform rotate(double rx_deg, double ry_deg, double rz_deg) {
    return {{0, 0, 0}, {rx_deg, ry_deg, rz_deg}};
  }
};

/// Normalized optimizer coordinates: one unit is 1 mm on axes 0-2 and
/// 1 degree on axes 3-5, so a unit step in parameter space is roughly a
/// unit displacement in physical space.
using ParamVector = std::array<double, 6>;

Mat3 rotation_matrix(const Vec3& euler_deg);

/// Decomposes an orthonormal matrix back to fixed-axis XYZ angles in
/// degrees. At gimbal lock (|pitch| = 90 deg) the Z angle is set to 0.
Vec3 euler_from_matrix(const Mat3& r);

double canonical_angle_deg(double deg);
RigidTransform canonicalized(const RigidTransform& t);

RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform invert(const RigidTransform& t);

/// Realized affine map p -> R*(p - pivot) + pivot + t.
struct WorldMap {
  Mat3 rotation;
  Vec3 offset{0, 0, 0};

  Vec3 apply(const Vec3& p) const { return rotation * p + offset; }
};

WorldMap world_map(const RigidTransform& t, const Vec3& pivot = {0, 0, 0});

/// Residual decomposition of T_ref^-1 * T_reg: signed per-axis values,
/// their absolute values, and a geodesic rotation angle for diagnostics.
struct ErrorDecomposition {
  Vec3 translation_mm{0, 0, 0};      // signed
  Vec3 rotation_deg{0, 0, 0};        // signed
  Vec3 abs_translation_mm{0, 0, 0};
  Vec3 abs_rotation_deg{0, 0, 0};
  double max_abs_translation_mm = 0.0;
  double max_abs_rotation_deg = 0.0;
  double translation_norm_mm = 0.0;
  double geodesic_rotation_deg = 0.0;
};

ErrorDecomposition error_of(const RigidTransform& t_reference,
                            const RigidTransform& t_registration);

ParamVector to_params(const RigidTransform& t);
RigidTransform from_params(const ParamVector& p);

/// JSON round-trip:
/// {"t_mm":[..],"euler_deg":[..],"convention":"XYZ-fixed-center"}
std::string to_json(const RigidTransform& t);
RigidTransform transform_from_json(const std::string& text);

}  // namespace usreg
