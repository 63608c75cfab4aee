#pragma once

// Depth-to-grayscale export: near surfaces render white, far ones black,
// pixels with no depth return stay 0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "skillgauge/errors.hpp"
#include "skillgauge/types.hpp"

namespace skillgauge::viz {

// near maps to 255, far to 0; depths outside [near, far] clamp to the
// endpoints. depth_scale converts raw device units to meters so the mapping
// is self-contained.
struct GrayscaleMapping {
  double near_m = 0;
  double far_m = 0;
  double depth_scale = 0;

  void validate() const {
    if (depth_scale <= 0)
      throw ValidationError("grayscale mapping: depth_scale must be > 0");
    if (!(0 < near_m && near_m < far_m))
      throw ValidationError("grayscale mapping: requires 0 < near < far");
  }
};

inline std::uint8_t gray_value(std::uint16_t raw,
                               const GrayscaleMapping& mapping) {
  if (raw == 0) return 0;  // invalid depth
  const double d = raw * mapping.depth_scale;
  const double c = std::clamp(d, mapping.near_m, mapping.far_m);
  // round half up so the midpoint lands on 128
  const double g =
      std::floor(255.0 * (mapping.far_m - c) / (mapping.far_m - mapping.near_m) + 0.5);
  return static_cast<std::uint8_t>(g);
}

inline std::vector<std::uint8_t> depth_to_gray(const DepthFrame& frame,
                                               const GrayscaleMapping& mapping) {
  mapping.validate();
  std::vector<std::uint8_t> out(frame.values.size());
  for (std::size_t i = 0; i < frame.values.size(); ++i)
    out[i] = gray_value(frame.values[i], mapping);
  return out;
}

// Default normalization range: 1st/99th percentile of the valid depths in
// the first frame, then frozen for the rest of the sequence so the video
// does not flicker.
inline GrayscaleMapping auto_mapping(const DepthFrame& first_frame,
                                     double depth_scale) {
  std::vector<std::uint16_t> valid;
  valid.reserve(first_frame.values.size());
  for (std::uint16_t v : first_frame.values)
    if (v != 0) valid.push_back(v);
  if (valid.empty())
    throw ValidationError("auto_mapping: first frame has no valid depth");
  std::sort(valid.begin(), valid.end());
  auto percentile = [&](double p) {
    const auto idx = static_cast<std::size_t>(
        std::llround(p * static_cast<double>(valid.size() - 1)));
    return valid[idx];
  };
  GrayscaleMapping m;
  m.depth_scale = depth_scale;
  m.near_m = percentile(0.01) * depth_scale;
  m.far_m = percentile(0.99) * depth_scale;
  if (m.near_m >= m.far_m) m.far_m = m.near_m + depth_scale;  // flat scene
  return m;
}

}  // namespace skillgauge::viz
