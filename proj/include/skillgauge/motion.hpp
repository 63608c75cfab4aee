#pragma once

// Path-length analytics over 3D hand trajectories: total Euclidean path,
// orthogonal-plane projections (XY, YZ, XZ), and per-gesture distances.
//
// Everything here is a pure function; per-step distances are accumulated in
// frame order so sums are bit-reproducible run to run.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "skillgauge/errors.hpp"
#include "skillgauge/geometry.hpp"
#include "skillgauge/types.hpp"

namespace skillgauge::motion {

// Bridge connects the last valid sample before a gap straight to the first
// one after it; Skip lets gaps contribute nothing.
enum class GapPolicy { Bridge, Skip };

inline std::string_view to_string(GapPolicy p) {
  return p == GapPolicy::Bridge ? "bridge" : "skip";
}

inline GapPolicy parse_gap_policy(std::string_view name) {
  if (name == "bridge") return GapPolicy::Bridge;
  if (name == "skip") return GapPolicy::Skip;
  throw ParseError("unknown gap policy '" + std::string(name) + "'");
}

struct PathMetrics {
  double length_3d = 0;   // meters
  double length_xy = 0;   // z dropped
  double length_yz = 0;   // x dropped
  double length_xz = 0;   // y dropped
  int frames_used = 0;
  int gap_count = 0;
  double gap_bridged_distance = 0;  // 3D distance contributed across gaps

  PathMetrics& operator+=(const PathMetrics& o) {
    length_3d += o.length_3d;
    length_xy += o.length_xy;
    length_yz += o.length_yz;
    length_xz += o.length_xz;
    frames_used += o.frames_used;
    gap_count += o.gap_count;
    gap_bridged_distance += o.gap_bridged_distance;
    return *this;
  }
};

// 3D and planar lengths in one frame-ordered pass. Each planar term drops
// one coordinate of the same step, so every planar length is bounded by the
// 3D length step by step.
inline PathMetrics path_length_3d(const geometry::Trajectory3D& traj,
                                  GapPolicy policy = GapPolicy::Bridge) {
  if (traj.samples.empty())
    throw EmptyInput("path_length_3d: trajectory has no samples");
  PathMetrics m;
  m.frames_used = static_cast<int>(traj.samples.size());
  m.gap_count = static_cast<int>(traj.gaps.size());
  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
    const auto& a = traj.samples[i];
    const auto& b = traj.samples[i + 1];
    const bool bridged = b.frame != a.frame + 1;
    if (bridged && policy == GapPolicy::Skip) continue;
    const double dx = b.p.x - a.p.x;
    const double dy = b.p.y - a.p.y;
    const double dz = b.p.z - a.p.z;
    const double d3 = std::sqrt(dx * dx + dy * dy + dz * dz);
    m.length_3d += d3;
    m.length_xy += std::sqrt(dx * dx + dy * dy);
    m.length_yz += std::sqrt(dy * dy + dz * dz);
    m.length_xz += std::sqrt(dx * dx + dz * dz);
    if (bridged) m.gap_bridged_distance += d3;
  }
  return m;
}

// (length_xy, length_yz, length_xz) under the same gap policy.
inline std::array<double, 3> planar_lengths(const geometry::Trajectory3D& traj,
                                            GapPolicy policy = GapPolicy::Bridge) {
  const PathMetrics m = path_length_3d(traj, policy);
  return {m.length_xy, m.length_yz, m.length_xz};
}

struct GestureDistance {
  double distance = 0;  // meters
  int step_count = 0;
};

using GestureDistanceMap = std::map<GestureLabel, GestureDistance>;

// Attributes the step between frames t and t+1 to the gesture at frame t.
// Bridged steps go to the label of the last valid frame before the gap.
// Keys are exactly the labels that occur in the sequence, so untouched
// gestures report zero distance rather than disappearing.
inline GestureDistanceMap gesture_distances(const geometry::Trajectory3D& traj,
                                            const LabelSequence& labels,
                                            GapPolicy policy = GapPolicy::Bridge) {
  if (static_cast<int>(labels.size()) != traj.frame_count)
    throw ValidationError("gesture_distances: " + std::to_string(labels.size()) +
                          " labels for " + std::to_string(traj.frame_count) +
                          " frames");
  GestureDistanceMap out;
  for (GestureLabel g : labels) out[g];  // ensure every occurring label has a row
  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
    const auto& a = traj.samples[i];
    const auto& b = traj.samples[i + 1];
    const bool bridged = b.frame != a.frame + 1;
    if (bridged && policy == GapPolicy::Skip) continue;
    const double dx = b.p.x - a.p.x;
    const double dy = b.p.y - a.p.y;
    const double dz = b.p.z - a.p.z;
    auto& row = out[labels[static_cast<std::size_t>(a.frame)]];
    row.distance += std::sqrt(dx * dx + dy * dy + dz * dz);
    row.step_count += 1;
  }
  return out;
}

inline GestureDistanceMap& operator+=(GestureDistanceMap& lhs,
                                      const GestureDistanceMap& rhs) {
  for (const auto& [g, d] : rhs) {
    lhs[g].distance += d.distance;
    lhs[g].step_count += d.step_count;
  }
  return lhs;
}

// Optional centered moving average over the sample points (meters domain).
// Off by default everywhere; the window shrinks at the ends. Frames and gaps
// are untouched.
inline geometry::Trajectory3D smooth_trajectory(const geometry::Trajectory3D& traj,
                                                int window) {
  if (window < 3 || window % 2 == 0)
    throw ValidationError("smooth_trajectory: window must be odd and >= 3");
  geometry::Trajectory3D out = traj;
  const int n = static_cast<int>(traj.samples.size());
  const int half = window / 2;
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    geometry::Point3 acc;
    for (int j = lo; j <= hi; ++j) {
      acc.x += traj.samples[j].p.x;
      acc.y += traj.samples[j].p.y;
      acc.z += traj.samples[j].p.z;
    }
    const double k = hi - lo + 1;
    out.samples[i].p = {acc.x / k, acc.y / k, acc.z / k};
  }
  return out;
}

}  // namespace skillgauge::motion
