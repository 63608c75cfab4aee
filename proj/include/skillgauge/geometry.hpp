#pragma once

// Pixel-space detections + depth -> metric 3D positions.
//
// Camera axes follow the standard pinhole convention: x right, y down,
// z forward along the optical axis. Raw depth units stay untouched until
// deproject() applies depth_scale.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "skillgauge/errors.hpp"
#include "skillgauge/types.hpp"

namespace skillgauge::geometry {

struct Point3 {
  double x = 0;
  double y = 0;
  double z = 0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

struct TrajectorySample {
  int frame = 0;
  Point3 p;
};

// Time-ordered 3D positions of one hand. samples and gaps partition the
// frame range [0, frame_count) exactly: every frame is in one or the other.
struct Trajectory3D {
  ObjectClass hand = ObjectClass::LeftHand;
  std::vector<TrajectorySample> samples;  // frame indices strictly increasing
  std::vector<int> gaps;                  // frames with no valid position
  int frame_count = 0;
};

// Inverse pinhole mapping. depth_raw is in device units (continuous so that
// aggregated depths, e.g. a median of two samples, pass through unchanged).
inline Point3 deproject(double u, double v, double depth_raw,
                        const CameraIntrinsics& intr) {
  if (depth_raw <= 0)
    throw InvalidDepth("deproject: depth_raw must be > 0");
  const double z = depth_raw * intr.depth_scale;
  return Point3{(u - intr.cx) * z / intr.fx, (v - intr.cy) * z / intr.fy, z};
}

// Median raw depth over a window x window patch centered on the box center,
// clipped to the image. Zero samples are depth dropouts and are ignored;
// nullopt when the whole patch is invalid. Even counts average the middle
// pair, so the result can be fractional.
inline std::optional<double> sample_depth_at(const DepthFrame& frame,
                                             const BoundingBox& box,
                                             int window) {
  if (window < 1 || window % 2 == 0)
    throw ValidationError("sample_depth_at: window must be odd and >= 1");
  const int u0 = std::clamp(static_cast<int>(std::floor(box.center_u())), 0,
                            frame.width - 1);
  const int v0 = std::clamp(static_cast<int>(std::floor(box.center_v())), 0,
                            frame.height - 1);
  const int half = window / 2;
  std::vector<std::uint16_t> valid;
  valid.reserve(static_cast<std::size_t>(window) * window);
  for (int v = std::max(0, v0 - half); v <= std::min(frame.height - 1, v0 + half); ++v) {
    for (int u = std::max(0, u0 - half); u <= std::min(frame.width - 1, u0 + half); ++u) {
      const std::uint16_t d = frame.at(u, v);
      if (d != 0) valid.push_back(d);
    }
  }
  if (valid.empty()) return std::nullopt;
  std::sort(valid.begin(), valid.end());
  const std::size_t n = valid.size();
  if (n % 2 == 1) return static_cast<double>(valid[n / 2]);
  return (static_cast<double>(valid[n / 2 - 1]) +
          static_cast<double>(valid[n / 2])) / 2.0;
}

namespace detail {

// Confidence argmax with deterministic tie-breaks: larger box area, then
// lower x_min. Absent confidences (ground-truth style boxes) rank as 1.0.
inline bool better_candidate(const Detection& a, const Detection& b) {
  const double ca = a.confidence.value_or(1.0);
  const double cb = b.confidence.value_or(1.0);
  if (ca != cb) return ca > cb;
  if (a.box.area() != b.box.area()) return a.box.area() > b.box.area();
  return a.box.x_min < b.box.x_min;
}

}  // namespace detail

// Builds one hand's trajectory over a contiguous frame stream. Frames with
// no detection of the requested class, or no valid depth in the sampling
// window, become gaps.
inline Trajectory3D build_trajectory(const std::vector<DepthFrame>& frames,
                                     const DetectionSet& detections,
                                     ObjectClass hand,
                                     const CameraIntrinsics& intr,
                                     int window = 5) {
  if (frames.empty()) throw EmptyInput("build_trajectory: zero frames");
  const int width = frames.front().width;
  const int height = frames.front().height;
  if (intr.cx < 0 || intr.cx >= width || intr.cy < 0 || intr.cy >= height)
    throw ValidationError("intrinsics principal point outside image");

  std::map<int, const Detection*> best;  // frame -> winning detection
  for (const Detection& d : detections.items) {
    if (d.cls != hand) continue;
    if (d.frame < 0 || d.frame >= static_cast<int>(frames.size()))
      throw ValidationError("detection references frame " +
                            std::to_string(d.frame) +
                            " outside the depth stream");
    auto [it, inserted] = best.emplace(d.frame, &d);
    if (!inserted && detail::better_candidate(d, *it->second)) it->second = &d;
  }

  Trajectory3D traj;
  traj.hand = hand;
  traj.frame_count = static_cast<int>(frames.size());
  for (const DepthFrame& frame : frames) {
    auto it = best.find(frame.index);
    if (it == best.end()) {
      traj.gaps.push_back(frame.index);
      continue;
    }
    const BoundingBox& box = it->second->box;
    if (!box.intersects_image(width, height))
      throw ValidationError("frame " + std::to_string(frame.index) +
                            ": bounding box entirely outside the image");
    const auto depth = sample_depth_at(frame, box, window);
    if (!depth) {
      traj.gaps.push_back(frame.index);
      continue;
    }
    // A partially visible box can center outside the image; clamp back in.
    const double u = std::clamp(box.center_u(), 0.0, width - 1.0);
    const double v = std::clamp(box.center_v(), 0.0, height - 1.0);
    traj.samples.push_back({frame.index, deproject(u, v, *depth, intr)});
  }
  return traj;
}

}  // namespace skillgauge::geometry
