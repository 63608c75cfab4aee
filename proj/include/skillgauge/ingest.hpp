#pragma once

// Parsers and writers for every external file format: 16-bit PGM depth
// frames with a JSON sidecar, camera intrinsics, JSON-Lines detections,
// frame-wise gesture label files, and group manifests.
//
// All loaders return immutable value types and are reentrant. Loading is
// deterministic and independent of filesystem enumeration order (directory
// listings are sorted by parsed frame index before use).

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "skillgauge/errors.hpp"
#include "skillgauge/types.hpp"

namespace skillgauge::ingest {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// PGM (binary P5)
// ---------------------------------------------------------------------------

namespace detail {

inline std::string read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

// Reads one PNM header token, skipping whitespace and '#' comments.
inline std::string pnm_token(const std::string& data, std::size_t& pos,
                             const fs::path& path) {
  while (pos < data.size()) {
    char c = data[pos];
    if (c == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  std::size_t start = pos;
  while (pos < data.size() &&
         !std::isspace(static_cast<unsigned char>(data[pos]))) {
    ++pos;
  }
  if (start == pos)
    throw FormatError(path.string() + ": truncated PGM header");
  return data.substr(start, pos - start);
}

inline long pnm_int(const std::string& data, std::size_t& pos,
                    const fs::path& path) {
  const std::string tok = pnm_token(data, pos, path);
  try {
    std::size_t used = 0;
    long v = std::stol(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw FormatError(path.string() + ": bad PGM header token '" + tok + "'");
  }
}

}  // namespace detail

struct Pgm16 {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> values;  // row-major
};

// Binary P5, maxval 65535, samples big-endian per the PNM spec.
inline Pgm16 read_pgm16(const fs::path& path) {
  const std::string data = detail::read_file_bytes(path);
  std::size_t pos = 0;
  if (detail::pnm_token(data, pos, path) != "P5")
    throw FormatError(path.string() + ": not a binary PGM (P5) file");
  const long w = detail::pnm_int(data, pos, path);
  const long h = detail::pnm_int(data, pos, path);
  const long maxval = detail::pnm_int(data, pos, path);
  if (w <= 0 || h <= 0)
    throw FormatError(path.string() + ": non-positive PGM dimensions");
  if (maxval != 65535)
    throw FormatError(path.string() + ": PGM maxval " + std::to_string(maxval) +
                      ", expected 65535");
  ++pos;  // single whitespace byte after maxval
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (data.size() - pos < 2 * n)
    throw FormatError(path.string() + ": PGM raster truncated");
  Pgm16 img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto hi = static_cast<std::uint8_t>(data[pos + 2 * i]);
    const auto lo = static_cast<std::uint8_t>(data[pos + 2 * i + 1]);
    img.values[i] = static_cast<std::uint16_t>((hi << 8) | lo);
  }
  return img;
}

inline void write_pgm16(const fs::path& path, int width, int height,
                        const std::vector<std::uint16_t>& values) {
  if (values.size() != static_cast<std::size_t>(width) * height)
    throw ValidationError("write_pgm16: sample count does not match dimensions");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << "P5\n" << width << " " << height << "\n65535\n";
  std::string raster(values.size() * 2, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    raster[2 * i] = static_cast<char>(values[i] >> 8);
    raster[2 * i + 1] = static_cast<char>(values[i] & 0xff);
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
}

inline void write_pgm8(const fs::path& path, int width, int height,
                       const std::vector<std::uint8_t>& values) {
  if (values.size() != static_cast<std::size_t>(width) * height)
    throw ValidationError("write_pgm8: sample count does not match dimensions");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << "P5\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size()));
}

// ---------------------------------------------------------------------------
// meta.json / intrinsics.json
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json parse_json_file(const fs::path& path) {
  const std::string data = read_file_bytes(path);
  try {
    return nlohmann::json::parse(data);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline double require_number(const nlohmann::json& j, const char* key,
                             const fs::path& path) {
  if (!j.contains(key) || !j[key].is_number())
    throw ParseError(path.string() + ": missing numeric field '" +
                     std::string(key) + "'");
  return j[key].get<double>();
}

}  // namespace detail

inline SequenceMeta load_meta(const fs::path& path) {
  const nlohmann::json j = detail::parse_json_file(path);
  SequenceMeta meta;
  meta.width = static_cast<int>(detail::require_number(j, "width", path));
  meta.height = static_cast<int>(detail::require_number(j, "height", path));
  meta.depth_scale = detail::require_number(j, "depth_scale", path);
  if (j.contains("fps")) {
    meta.fps = detail::require_number(j, "fps", path);
  } else {
    // The recording frame rate is not always archived; 30 is a guess and is
    // flagged so reports can surface it.
    meta.fps = 30.0;
    meta.fps_defaulted = true;
  }
  if (meta.width <= 0 || meta.height <= 0)
    throw ValidationError(path.string() + ": non-positive dimensions");
  if (meta.fps <= 0)
    throw ValidationError(path.string() + ": fps must be > 0");
  if (meta.depth_scale <= 0)
    throw ValidationError(path.string() + ": depth_scale must be > 0");
  return meta;
}

inline CameraIntrinsics load_intrinsics(const fs::path& path) {
  const nlohmann::json j = detail::parse_json_file(path);
  CameraIntrinsics intr;
  intr.fx = detail::require_number(j, "fx", path);
  intr.fy = detail::require_number(j, "fy", path);
  intr.cx = detail::require_number(j, "cx", path);
  intr.cy = detail::require_number(j, "cy", path);
  intr.depth_scale = detail::require_number(j, "depth_scale", path);
  if (intr.fx <= 0 || intr.fy <= 0)
    throw ValidationError(path.string() + ": focal lengths must be > 0");
  if (intr.depth_scale <= 0)
    throw ValidationError(path.string() + ": depth_scale must be > 0");
  // cx/cy bounds are checked at first frame pairing, when the image size
  // is known (geometry::build_trajectory).
  return intr;
}

// ---------------------------------------------------------------------------
// Depth sequences
// ---------------------------------------------------------------------------

// Frame file names follow frame_%06d.pgm. Returns the parsed index or
// nullopt for unrelated files.
inline std::optional<int> frame_index_from_name(const std::string& name) {
  constexpr std::string_view prefix = "frame_";
  constexpr std::string_view suffix = ".pgm";
  if (name.size() != prefix.size() + 6 + suffix.size()) return std::nullopt;
  if (name.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
  if (name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
    return std::nullopt;
  int idx = 0;
  for (std::size_t i = prefix.size(); i < prefix.size() + 6; ++i) {
    if (name[i] < '0' || name[i] > '9') return std::nullopt;
    idx = idx * 10 + (name[i] - '0');
  }
  return idx;
}

inline std::string frame_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d.pgm", index);
  return buf;
}

// Loads frame_%06d.pgm files plus the JSON sidecar. Frames come back in
// strictly ascending index order starting at 0; a hole in the numbering is a
// GapError naming every missing index.
inline DepthSequence load_depth_sequence(const fs::path& dir_path,
                                         const fs::path& meta_path) {
  if (!fs::is_directory(dir_path))
    throw ValidationError("'" + dir_path.string() + "' is not a directory");
  DepthSequence seq;
  seq.meta = load_meta(meta_path);

  std::map<int, fs::path> files;  // ordered by index
  for (const auto& entry : fs::directory_iterator(dir_path)) {
    if (!entry.is_regular_file()) continue;
    if (auto idx = frame_index_from_name(entry.path().filename().string()))
      files.emplace(*idx, entry.path());
  }
  if (files.empty())
    throw ValidationError("no frame_%06d.pgm files in '" + dir_path.string() +
                          "'");

  const int max_index = files.rbegin()->first;
  std::vector<int> missing;
  for (int i = 0; i <= max_index; ++i) {
    if (!files.count(i)) missing.push_back(i);
  }
  if (!missing.empty()) {
    std::string msg = dir_path.string() + ": missing frame indices [";
    for (std::size_t i = 0; i < missing.size(); ++i) {
      if (i) msg += ", ";
      msg += std::to_string(missing[i]);
    }
    msg += "]";
    throw GapError(msg, std::move(missing));
  }

  seq.frames.reserve(files.size());
  for (const auto& [index, path] : files) {
    Pgm16 img = read_pgm16(path);
    if (img.width != seq.meta.width || img.height != seq.meta.height)
      throw FormatError(path.string() + ": dimensions " +
                        std::to_string(img.width) + "x" +
                        std::to_string(img.height) + " do not match meta " +
                        std::to_string(seq.meta.width) + "x" +
                        std::to_string(seq.meta.height));
    DepthFrame frame;
    frame.index = index;
    frame.width = img.width;
    frame.height = img.height;
    frame.values = std::move(img.values);
    frame.timestamp = index / seq.meta.fps;
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Detections (JSON Lines)
// ---------------------------------------------------------------------------

// One line per frame:
//   {"frame":n,"detections":[{"class":str,"confidence":f,"bbox":[x0,y0,x1,y1]}]}
// Ground-truth files omit "confidence".
inline DetectionSet load_detections(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  DetectionSet set;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("frame") ||
        !j["frame"].is_number_integer() || !j.contains("detections") ||
        !j["detections"].is_array())
      throw ParseError(where + ": expected {\"frame\":n,\"detections\":[...]}");
    const int frame = j["frame"].get<int>();
    if (frame < 0) throw ParseError(where + ": negative frame index");
    for (const auto& d : j["detections"]) {
      if (!d.is_object() || !d.contains("class") || !d["class"].is_string() ||
          !d.contains("bbox") || !d["bbox"].is_array() ||
          d["bbox"].size() != 4)
        throw ParseError(where + ": malformed detection entry");
      Detection det;
      det.frame = frame;
      try {
        det.cls = parse_object_class(d["class"].get<std::string>());
      } catch (const ParseError& e) {
        throw ParseError(where + ": " + e.what());
      }
      for (const auto& v : d["bbox"]) {
        if (!v.is_number()) throw ParseError(where + ": non-numeric bbox");
      }
      det.box = BoundingBox{d["bbox"][0].get<double>(),
                            d["bbox"][1].get<double>(),
                            d["bbox"][2].get<double>(),
                            d["bbox"][3].get<double>()};
      if (!det.box.well_formed())
        throw ValidationError(where + ": inverted bounding box");
      if (d.contains("confidence")) {
        if (!d["confidence"].is_number())
          throw ParseError(where + ": non-numeric confidence");
        det.confidence = d["confidence"].get<double>();
        if (*det.confidence < 0.0 || *det.confidence > 1.0)
          throw ValidationError(where + ": confidence outside [0,1]");
      }
      set.items.push_back(det);
    }
  }
  // Deterministic order regardless of line order in the file.
  std::stable_sort(set.items.begin(), set.items.end(),
                   [](const Detection& a, const Detection& b) {
                     return a.frame < b.frame;
                   });
  return set;
}

// Inverse of load_detections; numbers round-trip bit-exactly (shortest
// representation that reparses to the same double).
inline void save_detections(const fs::path& path, const DetectionSet& set) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  std::map<int, std::vector<const Detection*>> by_frame;
  for (const Detection& d : set.items) by_frame[d.frame].push_back(&d);
  for (const auto& [frame, dets] : by_frame) {
    nlohmann::ordered_json line;
    line["frame"] = frame;
    auto& arr = line["detections"] = nlohmann::json::array();
    for (const Detection* d : dets) {
      nlohmann::ordered_json obj;
      obj["class"] = std::string(to_string(d->cls));
      if (d->confidence) obj["confidence"] = *d->confidence;
      obj["bbox"] = {d->box.x_min, d->box.y_min, d->box.x_max, d->box.y_max};
      arr.push_back(obj);
    }
    out << line.dump() << "\n";
  }
}

// ---------------------------------------------------------------------------
// Labels
// ---------------------------------------------------------------------------

// Plain text, one label token per line.
inline LabelSequence load_labels(const fs::path& path, TaskProfile profile) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  LabelSequence labels;
  std::string line;
  int line_no = 0;
  bool saw_blank = false;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() &&
           std::isspace(static_cast<unsigned char>(line.back())))
      line.pop_back();
    if (line.empty()) {
      // Only a trailing blank line is tolerated; a blank line between tokens
      // would silently shift the frame alignment.
      saw_blank = true;
      continue;
    }
    if (saw_blank)
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": blank line inside label file");
    GestureLabel g;
    try {
      g = parse_gesture_label(line);
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " +
                       e.what());
    }
    if (!profile_allows(profile, g))
      throw ProfileError(path.string() + ":" + std::to_string(line_no) +
                         ": label " + std::string(token(g)) +
                         " not allowed under profile '" +
                         std::string(to_string(profile)) + "'");
    labels.push_back(g);
  }
  if (labels.empty())
    throw ValidationError(path.string() + ": empty label file");
  return labels;
}

inline void write_labels(const fs::path& path, const LabelSequence& labels) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  for (GestureLabel g : labels) out << token(g) << "\n";
}

// ---------------------------------------------------------------------------
// Group manifests
// ---------------------------------------------------------------------------

// JSON array of entries. Relative paths resolve against the manifest's own
// directory so a dataset can be moved as a unit.
inline GroupManifest load_manifest(const fs::path& path) {
  const nlohmann::json j = detail::parse_json_file(path);
  if (!j.is_array())
    throw ParseError(path.string() + ": manifest must be a JSON array");
  const fs::path base = path.has_parent_path() ? path.parent_path() : ".";
  auto resolve = [&](const std::string& p) {
    fs::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  GroupManifest manifest;
  std::set<std::tuple<std::string, Group, std::string>> seen;
  int i = 0;
  for (const auto& e : j) {
    const std::string where = path.string() + ": entry " + std::to_string(i++);
    if (!e.is_object()) throw ParseError(where + ": not an object");
    auto str_field = [&](const char* key, bool required) -> std::string {
      if (!e.contains(key)) {
        if (required)
          throw ParseError(where + ": missing field '" + std::string(key) + "'");
        return {};
      }
      if (!e[key].is_string())
        throw ParseError(where + ": field '" + std::string(key) +
                         "' must be a string");
      return e[key].get<std::string>();
    };
    ManifestEntry entry;
    entry.participant = str_field("participant", true);
    entry.group = parse_group(str_field("group", true));
    entry.task = str_field("task", true);
    entry.depth_dir = resolve(str_field("depth_dir", true)).string();
    const std::string meta = str_field("meta", false);
    entry.meta = meta.empty() ? (fs::path(entry.depth_dir) / "meta.json").string()
                              : resolve(meta).string();
    entry.detections = resolve(str_field("detections", true)).string();
    const std::string labels = str_field("labels", false);
    if (!labels.empty()) entry.labels = resolve(labels).string();

    if (!seen.insert({entry.task, entry.group, entry.participant}).second)
      throw ValidationError(where + ": duplicate participant '" +
                            entry.participant + "' for task '" + entry.task +
                            "' in group " + std::string(to_string(entry.group)));
    for (const std::string& p :
         {entry.depth_dir, entry.meta, entry.detections}) {
      if (!fs::exists(p))
        throw ValidationError(where + ": path does not exist: '" + p + "'");
    }
    if (!entry.labels.empty() && !fs::exists(entry.labels))
      throw ValidationError(where + ": path does not exist: '" + entry.labels +
                            "'");
    manifest.push_back(std::move(entry));
  }
  return manifest;
}

}  // namespace skillgauge::ingest
