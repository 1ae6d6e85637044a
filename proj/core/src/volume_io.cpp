#include "usreg/volume_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "usreg/errors.hpp"

namespace usreg {

namespace fs = std::filesystem;
using nlohmann::json;

std::size_t RoiMask::count() const {
  std::size_t n = 0;
  for (auto b : bits) n += b ? 1 : 0;
  return n;
}

double RoiMask::fraction() const {
  return bits.empty() ? 0.0
                      : static_cast<double>(count()) /
                            static_cast<double>(bits.size());
}

namespace {

json read_header(const std::string& header_path) {
  std::ifstream in(header_path);
  if (!in) {
    raise(ErrorCode::io_error, "cannot open header: " + header_path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    raise(ErrorCode::malformed_header,
          "malformed volume header " + header_path + ": " + e.what());
  }
  for (const char* key : {"dims", "spacing_mm", "origin_mm", "dtype",
                          "data_file"}) {
    if (!j.contains(key)) {
      raise(ErrorCode::malformed_header,
            std::string("volume header missing field: ") + key);
    }
  }
  if (j["dims"].size() != 3 || j["spacing_mm"].size() != 3 ||
      j["origin_mm"].size() != 3) {
    raise(ErrorCode::malformed_header,
          "dims/spacing_mm/origin_mm must each have 3 entries");
  }
  return j;
}

std::vector<char> read_payload(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(ErrorCode::io_error, "cannot open payload: " + path.string());
  }
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return bytes;
}

void write_binary(const fs::path& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    raise(ErrorCode::io_error, "cannot write: " + path.string());
  }
  out.write(static_cast<const char*>(data),
            static_cast<std::streamsize>(size));
  if (!out) {
    raise(ErrorCode::io_error, "short write: " + path.string());
  }
}

void write_header(const std::string& header_path, IVec3 dims, Vec3 spacing,
                  Vec3 origin, const std::string& dtype,
                  const std::string& data_file) {
  json j;
  j["dims"] = {dims.x, dims.y, dims.z};
  j["spacing_mm"] = {spacing.x, spacing.y, spacing.z};
  j["origin_mm"] = {origin.x, origin.y, origin.z};
  j["dtype"] = dtype;
  j["data_file"] = data_file;
  std::ofstream out(header_path, std::ios::trunc);
  if (!out) {
    raise(ErrorCode::io_error, "cannot write header: " + header_path);
  }
  out << j.dump(2) << "\n";
}

std::string payload_name(const std::string& header_path) {
  fs::path p(header_path);
  std::string stem = p.filename().string();
  // strip .json then a possible .vol
  if (auto pos = stem.rfind(".json"); pos != std::string::npos) {
    stem = stem.substr(0, pos);
  }
  if (auto pos = stem.rfind(".vol"); pos != std::string::npos) {
    stem = stem.substr(0, pos);
  }
  return stem + ".raw";
}

}  // namespace

void save_volume(const Volume3D& vol, const std::string& header_path,
                 const std::string& dtype) {
  vol.validate();
  const fs::path header(header_path);
  const std::string data_file = payload_name(header_path);
  const fs::path payload = header.parent_path() / data_file;

  const std::size_t n = vol.data.size();
  if (dtype == "f32") {
    std::vector<float> buf(n);
    for (std::size_t i = 0; i < n; ++i) {
      buf[i] = static_cast<float>(vol.data[i]);
    }
    write_binary(payload, buf.data(), n * sizeof(float));
  } else if (dtype == "u8") {
    std::vector<std::uint8_t> buf(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::clamp(vol.data[i], 0.0, 1.0);
      buf[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
    write_binary(payload, buf.data(), n);
  } else {
    raise(ErrorCode::unsupported_dtype, "unsupported dtype: " + dtype);
  }
  write_header(header_path, vol.dims, vol.spacing, vol.origin, dtype,
               data_file);
}

Volume3D load_volume(const std::string& header_path) {
  const json j = read_header(header_path);
  const std::string dtype = j["dtype"].get<std::string>();
  if (dtype != "u8" && dtype != "f32") {
    raise(ErrorCode::unsupported_dtype, "unsupported dtype: " + dtype);
  }

  Volume3D vol;
  vol.dims = {j["dims"][0].get<int>(), j["dims"][1].get<int>(),
              j["dims"][2].get<int>()};
  vol.spacing = {j["spacing_mm"][0].get<double>(),
                 j["spacing_mm"][1].get<double>(),
                 j["spacing_mm"][2].get<double>()};
  vol.origin = {j["origin_mm"][0].get<double>(),
                j["origin_mm"][1].get<double>(),
                j["origin_mm"][2].get<double>()};
  if (vol.dims.x <= 0 || vol.dims.y <= 0 || vol.dims.z <= 0) {
    raise(ErrorCode::malformed_header, "header dims must be positive");
  }
  if (vol.spacing.x <= 0 || vol.spacing.y <= 0 || vol.spacing.z <= 0) {
    raise(ErrorCode::malformed_header, "header spacing must be positive");
  }

  const fs::path payload =
      fs::path(header_path).parent_path() / j["data_file"].get<std::string>();
  const std::vector<char> bytes = read_payload(payload);
  const std::size_t n = static_cast<std::size_t>(vol.dims.product());

  if (dtype == "f32") {
    if (bytes.size() != n * sizeof(float)) {
      raise(ErrorCode::size_mismatch,
            "payload size does not match dims: expected " +
                std::to_string(n * sizeof(float)) + " bytes, got " +
                std::to_string(bytes.size()));
    }
    std::vector<float> buf(n);
    std::memcpy(buf.data(), bytes.data(), bytes.size());
    vol.data.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const float v = buf[i];
      if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
        raise(ErrorCode::invalid_data,
              "f32 payload values must be finite and in [0,1]");
      }
      vol.data[i] = v;
    }
  } else {
    if (bytes.size() != n) {
      raise(ErrorCode::size_mismatch,
            "payload size does not match dims: expected " +
                std::to_string(n) + " bytes, got " +
                std::to_string(bytes.size()));
    }
    vol.data.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      vol.data[i] = static_cast<std::uint8_t>(bytes[i]) / 255.0;
    }
  }
  return vol;
}

void save_mask(const RoiMask& mask, const std::string& header_path) {
  if (mask.bits.size() != static_cast<std::size_t>(mask.dims.product())) {
    raise(ErrorCode::size_mismatch, "mask bits length does not match dims");
  }
  const fs::path header(header_path);
  const std::string data_file = payload_name(header_path);
  write_binary(header.parent_path() / data_file, mask.bits.data(),
               mask.bits.size());
  write_header(header_path, mask.dims, {1, 1, 1}, {0, 0, 0}, "u8", data_file);
}

RoiMask load_mask(const std::string& header_path) {
  const json j = read_header(header_path);
  if (j["dtype"].get<std::string>() != "u8") {
    raise(ErrorCode::unsupported_dtype, "mask dtype must be u8");
  }
  RoiMask mask;
  mask.dims = {j["dims"][0].get<int>(), j["dims"][1].get<int>(),
               j["dims"][2].get<int>()};
  const fs::path payload =
      fs::path(header_path).parent_path() / j["data_file"].get<std::string>();
  const std::vector<char> bytes = read_payload(payload);
  const std::size_t n = static_cast<std::size_t>(mask.dims.product());
  if (bytes.size() != n) {
    raise(ErrorCode::size_mismatch, "mask payload size does not match dims");
  }
  mask.bits.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = static_cast<std::uint8_t>(bytes[i]);
    if (b > 1) {
      raise(ErrorCode::invalid_data, "mask payload values must be 0 or 1");
    }
    mask.bits[i] = b;
  }
  mask.empty_flagged = mask.count() == 0;
  return mask;
}

}  // namespace usreg
