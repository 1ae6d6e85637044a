#pragma once

#include <string>
#include <vector>

#include "usreg/volume.hpp"

namespace usreg {

/// Boolean volume marking the coarse bone-interface region of interest.
struct RoiMask {
  IVec3 dims{0, 0, 0};
  std::vector<std::uint8_t> bits;
  /// Set when the fusion stage selected no voxel at all.
  bool empty_flagged = false;

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims.x) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(dims.y) * static_cast<std::size_t>(z));
  }

  bool test(int x, int y, int z) const { return bits[index(x, y, z)] != 0; }
  void set(int x, int y, int z, bool v) { bits[index(x, y, z)] = v ? 1 : 0; }

  std::size_t count() const;
  double fraction() const;
};

/// Volume file format: a JSON header naming dims, spacing, origin, dtype
/// ("u8" or "f32") and a relative raw payload path; the payload is
/// little-endian binary in x-fastest order. u8 maps to [0,1] by /255.
/// save followed by load round-trips the raw payload bit-exactly.
void save_volume(const Volume3D& vol, const std::string& header_path,
                 const std::string& dtype = "f32");
Volume3D load_volume(const std::string& header_path);

/// Masks reuse the volume format with dtype u8 and payload values {0,1}.
void save_mask(const RoiMask& mask, const std::string& header_path);
RoiMask load_mask(const std::string& header_path);

}  // namespace usreg
