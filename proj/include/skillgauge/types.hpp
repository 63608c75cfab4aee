#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skillgauge/errors.hpp"

namespace skillgauge {

// ---------------------------------------------------------------------------
// Object classes
// ---------------------------------------------------------------------------

enum class ObjectClass {
  LeftHand,
  RightHand,
  NeedleDriver,
  TissueForceps,
  DressingForceps,
  Scissors,
  Simulator,
};

inline constexpr std::array<ObjectClass, 7> kAllObjectClasses = {
    ObjectClass::LeftHand,       ObjectClass::RightHand,
    ObjectClass::NeedleDriver,   ObjectClass::TissueForceps,
    ObjectClass::DressingForceps, ObjectClass::Scissors,
    ObjectClass::Simulator,
};

// Display names are part of the report format; do not change them.
inline std::string_view to_string(ObjectClass c) {
  switch (c) {
    case ObjectClass::LeftHand: return "Left Hand";
    case ObjectClass::RightHand: return "Right Hand";
    case ObjectClass::NeedleDriver: return "Needle Driver";
    case ObjectClass::TissueForceps: return "Tissue Forceps";
    case ObjectClass::DressingForceps: return "Dressing Forceps";
    case ObjectClass::Scissors: return "Scissors";
    case ObjectClass::Simulator: return "Simulator";
  }
  return "?";
}

inline ObjectClass parse_object_class(std::string_view name) {
  for (ObjectClass c : kAllObjectClasses) {
    if (to_string(c) == name) return c;
  }
  throw ParseError("unknown object class '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Gesture labels
// ---------------------------------------------------------------------------

enum class GestureLabel { G0, G1, G2, G3, G4, G5, G6, G7 };

inline constexpr std::array<GestureLabel, 8> kAllGestureLabels = {
    GestureLabel::G0, GestureLabel::G1, GestureLabel::G2, GestureLabel::G3,
    GestureLabel::G4, GestureLabel::G5, GestureLabel::G6, GestureLabel::G7,
};

inline std::string_view token(GestureLabel g) {
  switch (g) {
    case GestureLabel::G0: return "G0";
    case GestureLabel::G1: return "G1";
    case GestureLabel::G2: return "G2";
    case GestureLabel::G3: return "G3";
    case GestureLabel::G4: return "G4";
    case GestureLabel::G5: return "G5";
    case GestureLabel::G6: return "G6";
    case GestureLabel::G7: return "G7";
  }
  return "?";
}

inline std::string_view display_name(GestureLabel g) {
  switch (g) {
    case GestureLabel::G0: return "Holding needle with a tool";
    case GestureLabel::G1: return "Needle passing";
    case GestureLabel::G2: return "Pull the suture";
    case GestureLabel::G3: return "Instrumental tie";
    case GestureLabel::G4: return "Lay the knot";
    case GestureLabel::G5: return "Cut the suture";
    case GestureLabel::G6: return "No Gesture";
    case GestureLabel::G7: return "Hand tie";
  }
  return "?";
}

inline GestureLabel parse_gesture_label(std::string_view tok) {
  for (GestureLabel g : kAllGestureLabels) {
    if (token(g) == tok) return g;
  }
  throw ParseError("unknown gesture label '" + std::string(tok) + "'");
}

// One GestureLabel per frame. Invariants (non-empty, labels drawn from the
// active profile) are enforced by the loader.
using LabelSequence = std::vector<GestureLabel>;

// G7 (hand tie) exists only on the fascia-closure simulator.
enum class TaskProfile { SuturePad, Fascia };

inline bool profile_allows(TaskProfile p, GestureLabel g) {
  if (g == GestureLabel::G7) return p == TaskProfile::Fascia;
  return true;
}

inline std::string_view to_string(TaskProfile p) {
  return p == TaskProfile::SuturePad ? "suture-pad" : "fascia";
}

inline TaskProfile parse_task_profile(std::string_view name) {
  if (name == "suture-pad") return TaskProfile::SuturePad;
  if (name == "fascia") return TaskProfile::Fascia;
  throw ParseError("unknown task profile '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Boxes and detections
// ---------------------------------------------------------------------------

// Continuous pixel coordinates, origin at the top-left corner.
struct BoundingBox {
  double x_min = 0;
  double y_min = 0;
  double x_max = 0;
  double y_max = 0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  double center_u() const { return (x_min + x_max) / 2.0; }
  double center_v() const { return (y_min + y_max) / 2.0; }

  bool well_formed() const { return x_min < x_max && y_min < y_max; }
  bool intersects_image(int width_px, int height_px) const {
    return x_min < width_px && x_max > 0 && y_min < height_px && y_max > 0;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// A labeled box on one frame. Ground-truth boxes carry no confidence.
struct Detection {
  int frame = 0;
  ObjectClass cls = ObjectClass::LeftHand;
  std::optional<double> confidence;
  BoundingBox box;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// Detections of one file, sorted by frame (stable within a frame).
struct DetectionSet {
  std::vector<Detection> items;

  friend bool operator==(const DetectionSet&, const DetectionSet&) = default;
};

// ---------------------------------------------------------------------------
// Depth frames and camera
// ---------------------------------------------------------------------------

struct CameraIntrinsics {
  double fx = 0;           // focal length, pixels
  double fy = 0;
  double cx = 0;           // principal point, pixels
  double cy = 0;
  double depth_scale = 0;  // meters per raw depth unit

  friend bool operator==(const CameraIntrinsics&,
                         const CameraIntrinsics&) = default;
};

struct SequenceMeta {
  int width = 0;
  int height = 0;
  double fps = 0;
  double depth_scale = 0;
  bool fps_defaulted = false;  // fps was absent and fell back to 30

  friend bool operator==(const SequenceMeta&, const SequenceMeta&) = default;
};

// One 16-bit depth image. Raw value 0 means no depth return; raw units are
// preserved untouched until geometry applies depth_scale.
struct DepthFrame {
  int index = 0;
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> values;  // row-major, width * height
  double timestamp = 0;               // seconds, index / fps

  std::uint16_t at(int u, int v) const {
    return values[static_cast<std::size_t>(v) * width + u];
  }

  friend bool operator==(const DepthFrame&, const DepthFrame&) = default;
};

struct DepthSequence {
  SequenceMeta meta;
  std::vector<DepthFrame> frames;
};

// ---------------------------------------------------------------------------
// Group manifests
// ---------------------------------------------------------------------------

enum class Group { Expert, Resident };

inline std::string_view to_string(Group g) {
  return g == Group::Expert ? "Expert" : "Resident";
}

inline Group parse_group(std::string_view name) {
  if (name == "Expert") return Group::Expert;
  if (name == "Resident") return Group::Resident;
  throw ParseError("unknown group '" + std::string(name) +
                   "' (expected Expert or Resident)");
}

struct ManifestEntry {
  std::string participant;
  Group group = Group::Expert;
  std::string task;
  std::string depth_dir;    // directory of frame_%06d.pgm files
  std::string meta;         // meta.json; defaults to depth_dir/meta.json
  std::string detections;   // JSONL detections for this recording
  std::string labels;       // frame-wise gesture labels; optional
};

using GroupManifest = std::vector<ManifestEntry>;

}  // namespace skillgauge
