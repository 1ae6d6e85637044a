#include "usreg/segmentation.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <utility>

#include "usreg/errors.hpp"

namespace usreg {

namespace {

constexpr int kBins = 256;

int bin_of(double v) {
  int b = static_cast<int>(v * kBins);
  return std::clamp(b, 0, kBins - 1);
}

int clamp_idx(int i, int n) { return std::clamp(i, 0, n - 1); }

}  // namespace

double otsu_threshold(const Volume3D& vol) {
  std::array<std::int64_t, kBins> hist{};
  for (double v : vol.data) ++hist[static_cast<std::size_t>(bin_of(v))];

  int populated = 0;
  for (auto c : hist) populated += c > 0 ? 1 : 0;
  if (populated < 2) {
    raise(ErrorCode::degenerate_histogram,
          "all voxels fall in a single histogram bin");
  }

  std::int64_t total_count = 0;
  std::int64_t total_sum = 0;  // sum of bin indices weighted by counts
  for (int b = 0; b < kBins; ++b) {
    total_count += hist[static_cast<std::size_t>(b)];
    total_sum += hist[static_cast<std::size_t>(b)] * b;
  }

  // Between-class variance for split k (class0 = bins < k). Weights and
  // sums stay integral so the scan is exact and ties break to the lowest
  // level deterministically.
  double best_var = -1.0;
  int best_k = 1;
  std::int64_t w0 = 0;
  std::int64_t s0 = 0;
  for (int k = 1; k < kBins; ++k) {
    w0 += hist[static_cast<std::size_t>(k - 1)];
    s0 += hist[static_cast<std::size_t>(k - 1)] * (k - 1);
    const std::int64_t w1 = total_count - w0;
    if (w0 == 0 || w1 == 0) continue;
    const std::int64_t s1 = total_sum - s0;
    const std::int64_t num = s0 * w1 - s1 * w0;
    const double var = static_cast<double>(num) * static_cast<double>(num) /
                       (static_cast<double>(w0) * static_cast<double>(w1));
    if (var > best_var) {
      best_var = var;
      best_k = k;
    }
  }
  return static_cast<double>(best_k) / kBins;
}

Volume3D sobel_depth(const Volume3D& vol, Axis beam_axis) {
  vol.validate();
  Volume3D out(vol.dims, vol.spacing, vol.origin, 0.0);

  // Slice-wise 2-D kernel on the planes spanned by the beam axis and the
  // first lateral axis: derivative along the beam, smoothing laterally.
  const int beam = static_cast<int>(beam_axis);
  const int lat = beam == 0 ? 1 : 0;

  const int nb = vol.dims[beam];
  const int nl = vol.dims[lat];

  IVec3 idx;
  const int other = 3 - beam - lat;
  const int no = vol.dims[other];
  for (int o = 0; o < no; ++o) {
    idx[other] = o;
    for (int b = 0; b < nb; ++b) {
      for (int l = 0; l < nl; ++l) {
        // Deep and shallow rows accumulate with identical weights so a
        // constant volume cancels exactly.
        double deep = 0.0;
        double shallow = 0.0;
        for (int dl = -1; dl <= 1; ++dl) {
          const double w = dl == 0 ? 2.0 : 1.0;
          IVec3 p = idx;
          p[lat] = clamp_idx(l + dl, nl);
          p[beam] = clamp_idx(b + 1, nb);
          deep += w * vol.at(p.x, p.y, p.z);
          p[beam] = clamp_idx(b - 1, nb);
          shallow += w * vol.at(p.x, p.y, p.z);
        }
        idx[beam] = b;
        idx[lat] = l;
        // Normalized so a unit step along the beam responds with 1.
        out.at(idx.x, idx.y, idx.z) = (deep - shallow) / 4.0;
      }
    }
  }
  return out;
}

Volume3D mean_filter(const Volume3D& vol, int radius) {
  if (radius < 1) {
    raise(ErrorCode::invalid_argument, "mean_filter radius must be >= 1");
  }
  vol.validate();

  // Separable box: one replicated-edge running pass per axis.
  auto pass = [&](const Volume3D& src, int axis) {
    Volume3D dst(src.dims, src.spacing, src.origin, 0.0);
    const int n = src.dims[axis];
    const double inv = 1.0 / (2 * radius + 1);
    IVec3 idx;
    const int a1 = axis == 0 ? 1 : 0;
    const int a2 = axis == 2 ? 1 : 2;
    for (int i2 = 0; i2 < src.dims[a2]; ++i2) {
      idx[a2] = i2;
      for (int i1 = 0; i1 < src.dims[a1]; ++i1) {
        idx[a1] = i1;
        for (int i = 0; i < n; ++i) {
          double acc = 0.0;
          for (int d = -radius; d <= radius; ++d) {
            IVec3 p = idx;
            p[axis] = clamp_idx(i + d, n);
            acc += src.at(p.x, p.y, p.z);
          }
          idx[axis] = i;
          dst.at(idx.x, idx.y, idx.z) = acc * inv;
        }
      }
    }
    return dst;
  };

  Volume3D out = pass(vol, 0);
  out = pass(out, 1);
  out = pass(out, 2);
  return out;
}

std::vector<std::uint8_t> beam_local_maxima(const Volume3D& vol,
                                            Axis beam_axis) {
  vol.validate();
  std::vector<std::uint8_t> marks(vol.data.size(), 0);
  const int beam = static_cast<int>(beam_axis);
  const int nb = vol.dims[beam];
  const int a1 = beam == 0 ? 1 : 0;
  const int a2 = beam == 2 ? 1 : 2;

  IVec3 idx;
  for (int i2 = 0; i2 < vol.dims[a2]; ++i2) {
    idx[a2] = i2;
    for (int i1 = 0; i1 < vol.dims[a1]; ++i1) {
      idx[a1] = i1;
      for (int b = 0; b < nb; ++b) {
        idx[beam] = b;
        const double v = vol.at(idx.x, idx.y, idx.z);
        bool is_max = true;
        for (int d : {-1, 1}) {
          const int nbr = b + d;
          if (nbr < 0 || nbr >= nb) continue;
          IVec3 p = idx;
          p[beam] = nbr;
          if (!(v > vol.at(p.x, p.y, p.z))) {
            is_max = false;
            break;
          }
        }
        if (nb == 1) is_max = false;  // no neighbor to exceed
        if (is_max) {
          marks[vol.index(idx.x, idx.y, idx.z)] = 1;
        }
      }
    }
  }
  return marks;
}

namespace {

void dilate_6_once(RoiMask& mask) {
  const IVec3 d = mask.dims;
  std::vector<std::uint8_t> out = mask.bits;
  for (int z = 0; z < d.z; ++z) {
    for (int y = 0; y < d.y; ++y) {
      for (int x = 0; x < d.x; ++x) {
        if (mask.bits[mask.index(x, y, z)]) continue;
        const bool nbr =
            (x > 0 && mask.bits[mask.index(x - 1, y, z)]) ||
            (x + 1 < d.x && mask.bits[mask.index(x + 1, y, z)]) ||
            (y > 0 && mask.bits[mask.index(x, y - 1, z)]) ||
            (y + 1 < d.y && mask.bits[mask.index(x, y + 1, z)]) ||
            (z > 0 && mask.bits[mask.index(x, y, z - 1)]) ||
            (z + 1 < d.z && mask.bits[mask.index(x, y, z + 1)]);
        if (nbr) out[mask.index(x, y, z)] = 1;
      }
    }
  }
  mask.bits = std::move(out);
}

}  // namespace

RoiMask fuse_and_dilate(const Volume3D& smoothed, double threshold,
                        const std::vector<std::uint8_t>& maxima,
                        int dilation_radius) {
  if (maxima.size() != smoothed.data.size()) {
    raise(ErrorCode::dimension_mismatch,
          "maxima size does not match volume size");
  }
  if (dilation_radius < 0) {
    raise(ErrorCode::invalid_argument, "dilation radius must be >= 0");
  }

  RoiMask mask;
  mask.dims = smoothed.dims;
  mask.bits.resize(smoothed.data.size(), 0);
  for (std::size_t i = 0; i < smoothed.data.size(); ++i) {
    mask.bits[i] = (smoothed.data[i] > threshold && maxima[i]) ? 1 : 0;
  }
  mask.empty_flagged = mask.count() == 0;

  for (int it = 0; it < dilation_radius; ++it) dilate_6_once(mask);
  return mask;
}

RoiMask dilate(const RoiMask& mask, int radius) {
  if (radius < 0) {
    raise(ErrorCode::invalid_argument, "dilation radius must be >= 0");
  }
  RoiMask out = mask;
  for (int it = 0; it < radius; ++it) dilate_6_once(out);
  return out;
}

RoiMask segment_roi(const Volume3D& vol, const SegmentationConfig& config) {
  vol.validate();
  const double threshold = otsu_threshold(vol);

  Volume3D edge = config.smooth_before_sobel
                      ? sobel_depth(mean_filter(vol, config.mean_radius),
                                    config.beam_axis)
                      : sobel_depth(vol, config.beam_axis);
  // Keep the positive (brightening-with-depth) side of the response; the
  // negative side is the band-to-shadow edge below the interface.
  for (double& v : edge.data) v = std::max(v, 0.0);
  if (!config.smooth_before_sobel) {
    edge = mean_filter(edge, config.mean_radius);
  }

  const Volume3D smoothed = mean_filter(vol, config.mean_radius);
  std::vector<std::uint8_t> maxima =
      beam_local_maxima(smoothed, config.beam_axis);

  if (config.edge_response_min > 0.0) {
    for (std::size_t i = 0; i < maxima.size(); ++i) {
      if (!(edge.data[i] > config.edge_response_min)) maxima[i] = 0;
    }
  }

  return fuse_and_dilate(smoothed, threshold, maxima, config.dilation_radius);
}

}  // namespace usreg
