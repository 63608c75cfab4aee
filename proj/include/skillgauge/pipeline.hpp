#pragma once

// End-to-end command implementations behind the CLI: manifest-driven path
// analyses, detection/segmentation evaluation, group comparison, and the
// grayscale export. Each command assembles its full MetricReport in memory
// (writing happens only after everything succeeded) and returns the report
// plus an optional CSV rendering.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "skillgauge/errors.hpp"
#include "skillgauge/eval_detect.hpp"
#include "skillgauge/eval_segment.hpp"
#include "skillgauge/geometry.hpp"
#include "skillgauge/ingest.hpp"
#include "skillgauge/log.hpp"
#include "skillgauge/motion.hpp"
#include "skillgauge/report.hpp"
#include "skillgauge/stats.hpp"
#include "skillgauge/types.hpp"
#include "skillgauge/version.hpp"
#include "skillgauge/viz.hpp"

namespace skillgauge::pipeline {

namespace fs = std::filesystem;
using report::Json;

struct CommandOutput {
  Json report;
  std::string csv;    // empty when the command has no CSV form
  int exit_code = 0;  // validate reports failures without throwing
};

// ---------------------------------------------------------------------------
// shared helpers
// ---------------------------------------------------------------------------

namespace detail {

// Runs fn(0..n-1) on up to `jobs` threads. On failure the exception of the
// lowest index is rethrown so error reporting does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t threads = std::min(static_cast<std::size_t>(jobs), n);
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline Json json_header(const char* command) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  return j;
}

inline Json json_intrinsics(const CameraIntrinsics& intr) {
  Json j;
  j["fx"] = intr.fx;
  j["fy"] = intr.fy;
  j["cx"] = intr.cx;
  j["cy"] = intr.cy;
  j["depth_scale"] = intr.depth_scale;
  return j;
}

inline Json json_metrics(const motion::PathMetrics& m) {
  Json j;
  j["length_3d"] = m.length_3d;
  j["length_xy"] = m.length_xy;
  j["length_yz"] = m.length_yz;
  j["length_xz"] = m.length_xz;
  j["frames_used"] = m.frames_used;
  j["gap_count"] = m.gap_count;
  j["gap_bridged_distance"] = m.gap_bridged_distance;
  return j;
}

inline Json json_gestures(const motion::GestureDistanceMap& map) {
  Json j;
  for (const auto& [g, d] : map) {
    Json row;
    row["distance"] = d.distance;
    row["steps"] = d.step_count;
    j[std::string(token(g))] = row;
  }
  return j;
}

inline Json json_descriptive(const stats::Descriptive& d) {
  Json j;
  j["mean"] = d.mean;
  j["std"] = d.stddev;
  j["n"] = d.n;
  return j;
}

// One group_stats row. Rows with an impossible test (one group missing, or
// zero variance) carry a note instead of aborting the whole report; commands
// whose entire statistical output is degenerate fail with DegenerateError.
struct StatsRow {
  Json row;
  bool computed = false;
  bool degenerate = false;
};

inline StatsRow stats_row(const std::string& task, const std::string& metric,
                          const std::optional<std::string>& gesture,
                          const std::vector<double>& expert_values,
                          const std::vector<double>& resident_values,
                          double alpha) {
  StatsRow out;
  Json& j = out.row;
  j["task"] = task;
  j["metric"] = metric;
  if (gesture) j["gesture"] = *gesture;
  const stats::SampleGroup experts{"Expert", expert_values};
  const stats::SampleGroup residents{"Resident", resident_values};
  j["expert"] = expert_values.empty() ? Json() : json_descriptive(stats::describe(experts));
  j["resident"] = resident_values.empty() ? Json() : json_descriptive(stats::describe(residents));
  if (expert_values.empty() || resident_values.empty()) {
    j["u"] = nullptr;
    j["p"] = nullptr;
    j["method"] = nullptr;
    j["significant"] = nullptr;
    j["note"] = "one group has no participants";
    return out;
  }
  try {
    const stats::TestResult r = stats::rank_sum_test(experts, residents, alpha);
    j["u"] = r.u_statistic;
    j["p"] = r.p_value;
    j["method"] = std::string(stats::to_string(r.method));
    j["significant"] = r.significant;
    out.computed = true;
  } catch (const DegenerateError&) {
    j["u"] = nullptr;
    j["p"] = nullptr;
    j["method"] = nullptr;
    j["significant"] = nullptr;
    j["note"] = "degenerate: all values identical across both groups";
    out.degenerate = true;
  }
  return out;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return report::csv_number(v.get<double>());
  if (v.is_string()) return csv_escape(v.get<std::string>());
  return v.dump();
}

inline std::string stats_csv(const Json& rows, bool gesture_column) {
  std::string csv = gesture_column
                        ? "task,gesture,expert_n,expert_mean,expert_std,"
                          "resident_n,resident_mean,resident_std,u,p,method,"
                          "significant\n"
                        : "task,metric,expert_n,expert_mean,expert_std,"
                          "resident_n,resident_mean,resident_std,u,p,method,"
                          "significant\n";
  for (const auto& r : rows) {
    csv += csv_cell(r["task"]) + ",";
    csv += gesture_column ? csv_cell(r["gesture"]) : csv_cell(r["metric"]);
    for (const char* group : {"expert", "resident"}) {
      if (r[group].is_null()) {
        csv += ",,,";
      } else {
        csv += "," + csv_cell(r[group]["n"]) + "," + csv_cell(r[group]["mean"]) +
               "," + csv_cell(r[group]["std"]);
      }
    }
    csv += "," + csv_cell(r["u"]) + "," + csv_cell(r["p"]) + "," +
           csv_cell(r["method"]) + "," + csv_cell(r["significant"]) + "\n";
  }
  return csv;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// path3d / project2d / gesture-dist
// ---------------------------------------------------------------------------

struct PathOptions {
  fs::path manifest_path;
  fs::path intrinsics_path;
  motion::GapPolicy gap_policy = motion::GapPolicy::Bridge;
  int window = 5;
  int smooth = 0;  // 0 disables; odd >= 3 applies a moving average
  int jobs = 1;
  double alpha = 0.05;
  TaskProfile profile = TaskProfile::SuturePad;  // for label loading
  std::optional<fs::path> dump_dir;              // trajectory JSONL dumps
};

namespace detail {

struct ParticipantResult {
  ManifestEntry entry;
  bool fps_defaulted = false;
  int frames = 0;
  std::optional<motion::PathMetrics> left;
  std::optional<motion::PathMetrics> right;
  motion::PathMetrics combined;
  std::optional<motion::GestureDistanceMap> gestures_left;
  std::optional<motion::GestureDistanceMap> gestures_right;
  motion::GestureDistanceMap gestures_combined;
};

inline void dump_trajectory(std::ofstream& out, const geometry::Trajectory3D& traj) {
  for (const auto& s : traj.samples) {
    nlohmann::ordered_json line;
    line["frame"] = s.frame;
    line["hand"] = std::string(to_string(traj.hand));
    line["xyz"] = {s.p.x, s.p.y, s.p.z};
    out << line.dump() << "\n";
  }
}

inline ParticipantResult process_participant(const ManifestEntry& entry,
                                             const CameraIntrinsics& intr,
                                             const PathOptions& opts,
                                             bool want_gestures) {
  ParticipantResult result;
  result.entry = entry;

  const DepthSequence seq =
      ingest::load_depth_sequence(entry.depth_dir, entry.meta);
  result.fps_defaulted = seq.meta.fps_defaulted;
  result.frames = static_cast<int>(seq.frames.size());
  const DetectionSet detections = ingest::load_detections(entry.detections);

  std::optional<LabelSequence> labels;
  if (want_gestures) {
    if (entry.labels.empty())
      throw ValidationError("manifest entry has no labels file");
    labels = ingest::load_labels(entry.labels, opts.profile);
  }

  std::optional<std::ofstream> dump;
  if (opts.dump_dir) {
    fs::create_directories(*opts.dump_dir);
    const fs::path p = *opts.dump_dir /
                       (entry.task + "__" + std::string(to_string(entry.group)) +
                        "__" + entry.participant + ".jsonl");
    dump.emplace(p, std::ios::trunc);
    if (!*dump) throw ValidationError("cannot write '" + p.string() + "'");
  }

  for (ObjectClass hand : {ObjectClass::LeftHand, ObjectClass::RightHand}) {
    geometry::Trajectory3D traj = geometry::build_trajectory(
        seq.frames, detections, hand, intr, opts.window);
    if (opts.smooth >= 3) traj = motion::smooth_trajectory(traj, opts.smooth);
    if (dump) dump_trajectory(*dump, traj);
    if (traj.samples.empty()) {
      log::info("participant '" + entry.participant + "': no " +
                std::string(to_string(hand)) + " samples");
      continue;
    }
    const motion::PathMetrics m = motion::path_length_3d(traj, opts.gap_policy);
    result.combined += m;
    auto& slot = hand == ObjectClass::LeftHand ? result.left : result.right;
    slot = m;
    if (want_gestures) {
      motion::GestureDistanceMap g =
          motion::gesture_distances(traj, *labels, opts.gap_policy);
      result.gestures_combined += g;
      auto& gslot = hand == ObjectClass::LeftHand ? result.gestures_left
                                                  : result.gestures_right;
      gslot = std::move(g);
    }
  }
  return result;
}

inline std::vector<ParticipantResult> process_manifest(const PathOptions& opts,
                                                       bool want_gestures,
                                                       CameraIntrinsics& intr_out) {
  if (opts.intrinsics_path.empty())
    throw ValidationError("--intrinsics is required for this command");
  intr_out = ingest::load_intrinsics(opts.intrinsics_path);
  const GroupManifest manifest = ingest::load_manifest(opts.manifest_path);
  if (manifest.empty())
    throw ValidationError(opts.manifest_path.string() + ": empty manifest");

  std::vector<ParticipantResult> results(manifest.size());
  parallel_for(manifest.size(), opts.jobs, [&](std::size_t i) {
    try {
      results[i] = process_participant(manifest[i], intr_out, opts, want_gestures);
    } catch (const GapError& e) {
      throw GapError("participant '" + manifest[i].participant + "': " + e.what(),
                     e.missing);
    } catch (const Error& e) {
      // keep the concrete type's exit-code class; rebuild with context
      throw ValidationError("participant '" + manifest[i].participant +
                            "': " + e.what());
    }
  });
  std::sort(results.begin(), results.end(),
            [](const ParticipantResult& a, const ParticipantResult& b) {
              if (a.entry.participant != b.entry.participant)
                return a.entry.participant < b.entry.participant;
              if (a.entry.task != b.entry.task) return a.entry.task < b.entry.task;
              return a.entry.group == Group::Expert && b.entry.group != Group::Expert;
            });
  return results;
}

inline Json json_participant(const ParticipantResult& r, bool want_gestures) {
  Json j;
  j["participant"] = r.entry.participant;
  j["group"] = std::string(to_string(r.entry.group));
  j["task"] = r.entry.task;
  j["frames"] = r.frames;
  j["fps_defaulted"] = r.fps_defaulted;
  Json hands;
  hands["Left Hand"] = r.left ? json_metrics(*r.left) : Json();
  hands["Right Hand"] = r.right ? json_metrics(*r.right) : Json();
  hands["combined"] = json_metrics(r.combined);
  j["hands"] = hands;
  if (want_gestures) {
    Json g;
    g["Left Hand"] = r.gestures_left ? json_gestures(*r.gestures_left) : Json();
    g["Right Hand"] = r.gestures_right ? json_gestures(*r.gestures_right) : Json();
    g["combined"] = json_gestures(r.gestures_combined);
    j["gesture_distances"] = g;
  }
  return j;
}

inline Json path_config(const PathOptions& opts, const CameraIntrinsics& intr,
                        bool with_profile) {
  Json config;
  config["manifest"] = opts.manifest_path.string();
  config["intrinsics"] = json_intrinsics(intr);
  config["gap_policy"] = std::string(motion::to_string(opts.gap_policy));
  config["window"] = opts.window;
  config["smooth"] = opts.smooth;
  config["jobs"] = opts.jobs;
  config["alpha"] = opts.alpha;
  if (with_profile) config["task_profile"] = std::string(to_string(opts.profile));
  return config;
}

// Pulls one metric per participant, grouped by (task, group), participants
// already in sorted order.
template <typename Getter>
inline void collect_values(const std::vector<ParticipantResult>& results,
                           const std::string& task, Getter&& get,
                           std::vector<double>& experts,
                           std::vector<double>& residents) {
  for (const ParticipantResult& r : results) {
    if (r.entry.task != task) continue;
    (r.entry.group == Group::Expert ? experts : residents).push_back(get(r));
  }
}

}  // namespace detail

inline CommandOutput run_path_command(const char* command,
                                      const PathOptions& opts,
                                      bool per_plane_stats) {
  CameraIntrinsics intr;
  const auto results = detail::process_manifest(opts, false, intr);

  Json j = detail::json_header(command);
  j["config"] = detail::path_config(opts, intr, false);
  Json participants = Json::array();
  for (const auto& r : results)
    participants.push_back(detail::json_participant(r, false));
  j["participants"] = participants;

  std::set<std::string> tasks;
  for (const auto& r : results) tasks.insert(r.entry.task);

  struct Metric {
    const char* name;
    double motion::PathMetrics::* field;
  };
  std::vector<Metric> metrics = {{"length_3d", &motion::PathMetrics::length_3d}};
  if (per_plane_stats) {
    metrics.push_back({"length_xy", &motion::PathMetrics::length_xy});
    metrics.push_back({"length_yz", &motion::PathMetrics::length_yz});
    metrics.push_back({"length_xz", &motion::PathMetrics::length_xz});
  }

  Json rows = Json::array();
  int computed = 0, attempted = 0;
  for (const std::string& task : tasks) {
    for (const Metric& m : metrics) {
      std::vector<double> experts, residents;
      detail::collect_values(
          results, task,
          [&](const detail::ParticipantResult& r) { return r.combined.*(m.field); },
          experts, residents);
      auto row = detail::stats_row(task, m.name, std::nullopt, experts,
                                   residents, opts.alpha);
      if (!experts.empty() && !residents.empty()) {
        ++attempted;
        if (row.computed) ++computed;
      }
      rows.push_back(std::move(row.row));
    }
  }
  if (attempted > 0 && computed == 0)
    throw DegenerateError(
        "all group comparisons are degenerate (no variation anywhere)");
  j["group_stats"] = rows;

  return {std::move(j), detail::stats_csv(rows, false), 0};
}

inline CommandOutput run_path3d(const PathOptions& opts) {
  return run_path_command("path3d", opts, false);
}

inline CommandOutput run_project2d(const PathOptions& opts) {
  return run_path_command("project2d", opts, true);
}

inline CommandOutput run_gesture_dist(const PathOptions& opts) {
  CameraIntrinsics intr;
  const auto results = detail::process_manifest(opts, true, intr);

  Json j = detail::json_header("gesture-dist");
  j["config"] = detail::path_config(opts, intr, true);
  Json participants = Json::array();
  for (const auto& r : results)
    participants.push_back(detail::json_participant(r, true));
  j["participants"] = participants;

  std::set<std::string> tasks;
  for (const auto& r : results) tasks.insert(r.entry.task);

  Json rows = Json::array();
  int computed = 0, attempted = 0;
  for (const std::string& task : tasks) {
    // union of gestures observed in this task, in G0..G7 order
    std::set<GestureLabel> gestures;
    for (const auto& r : results) {
      if (r.entry.task != task) continue;
      for (const auto& [g, d] : r.gestures_combined) gestures.insert(g);
    }
    for (GestureLabel g : gestures) {
      std::vector<double> experts, residents;
      detail::collect_values(
          results, task,
          [&](const detail::ParticipantResult& r) {
            auto it = r.gestures_combined.find(g);
            return it == r.gestures_combined.end() ? 0.0 : it->second.distance;
          },
          experts, residents);
      auto row = detail::stats_row(task, "gesture_distance",
                                   std::string(token(g)), experts, residents,
                                   opts.alpha);
      if (!experts.empty() && !residents.empty()) {
        ++attempted;
        if (row.computed) ++computed;
      }
      rows.push_back(std::move(row.row));
    }
  }
  if (attempted > 0 && computed == 0)
    throw DegenerateError(
        "all per-gesture comparisons are degenerate (no variation anywhere)");
  j["group_stats"] = rows;

  return {std::move(j), detail::stats_csv(rows, true), 0};
}

// ---------------------------------------------------------------------------
// eval-detect
// ---------------------------------------------------------------------------

struct DetectEvalOptions {
  fs::path pred_path;
  fs::path gt_path;
  eval_detect::DetectionEvalConfig config;
  bool conf_sweep = false;
};

inline CommandOutput run_eval_detect(const DetectEvalOptions& opts) {
  opts.config.validate();
  const DetectionSet pred = ingest::load_detections(opts.pred_path);
  const DetectionSet gt = ingest::load_detections(opts.gt_path);
  const eval_detect::APTable table = eval_detect::map_50_95(pred, gt, opts.config);

  Json j = detail::json_header("eval-detect");
  Json config;
  config["pred"] = opts.pred_path.string();
  config["gt"] = opts.gt_path.string();
  config["iou_thresholds"] = opts.config.iou_thresholds;
  Json class_names = Json::array();
  for (ObjectClass c : opts.config.classes)
    class_names.push_back(std::string(to_string(c)));
  config["classes"] = class_names;
  j["config"] = config;

  Json classes = Json::array();
  std::string csv = "class,occurrence,ap_50_95\n";
  for (ObjectClass c : opts.config.classes) {
    const eval_detect::ClassAP& row = table.per_class.at(c);
    Json cj;
    cj["class"] = std::string(to_string(c));
    cj["occurrence"] = row.occurrences;
    if (row.ap_mean) {
      cj["ap_per_threshold"] = row.ap_per_threshold;
      cj["ap_50_95"] = *row.ap_mean;
    } else {
      cj["ap_per_threshold"] = nullptr;
      cj["ap_50_95"] = nullptr;
    }
    classes.push_back(std::move(cj));
    csv += std::string(to_string(c)) + "," + std::to_string(row.occurrences) +
           "," + (row.ap_mean ? report::csv_number(*row.ap_mean) : "") + "\n";
  }
  j["classes"] = classes;
  j["map_50_95"] = table.map_mean ? Json(*table.map_mean) : Json();
  csv += "Average,," +
         (table.map_mean ? report::csv_number(*table.map_mean) : "") + "\n";

  if (opts.conf_sweep) {
    Json sweep = Json::array();
    for (const auto& row : eval_detect::confidence_sweep(pred, gt,
                                                         opts.config.classes)) {
      Json rj;
      rj["confidence"] = row.confidence;
      rj["tp"] = row.tp;
      rj["fp"] = row.fp;
      rj["fn"] = row.fn;
      rj["precision"] = row.precision;
      rj["recall"] = row.recall;
      sweep.push_back(std::move(rj));
    }
    j["confidence_sweep"] = sweep;
  }
  return {std::move(j), std::move(csv), 0};
}

// ---------------------------------------------------------------------------
// eval-segment
// ---------------------------------------------------------------------------

struct SegmentEvalOptions {
  fs::path pred_path;
  fs::path gt_path;
  TaskProfile profile = TaskProfile::SuturePad;
  bool exclude_background = false;
};

namespace detail {

struct VideoScore {
  std::string name;
  eval_segment::SegmentationScore score;
  std::map<int, eval_segment::F1Counts> counts;
  std::size_t frames_total = 0;
  std::size_t frames_correct = 0;
};

inline VideoScore score_video(const std::string& name, const fs::path& gt_path,
                              const fs::path& pred_path,
                              const SegmentEvalOptions& opts) {
  const LabelSequence gt = ingest::load_labels(gt_path, opts.profile);
  const LabelSequence pred = ingest::load_labels(pred_path, opts.profile);
  eval_segment::ScoreOptions sopts;
  sopts.exclude_background = opts.exclude_background;
  VideoScore v;
  v.name = name;
  v.score = eval_segment::score_segmentation(gt, pred, sopts);
  if (gt.size() != pred.size())
    throw ValidationError(name + ": label length mismatch");
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (opts.exclude_background && gt[i] == GestureLabel::G6) continue;
    ++v.frames_total;
    if (gt[i] == pred[i]) ++v.frames_correct;
  }
  auto gs = eval_segment::to_segments(gt);
  auto ps = eval_segment::to_segments(pred);
  if (opts.exclude_background) {
    gs = eval_segment::without_background(gs);
    ps = eval_segment::without_background(ps);
  }
  for (int k : sopts.f1_ks) v.counts[k] = eval_segment::f1_counts(gs, ps, k);
  return v;
}

}  // namespace detail

// When both paths are directories, files are paired by name and scores are
// both micro-averaged (pooled TP/FP/FN and frames) and macro-averaged
// (mean of per-video scores) across the split.
inline CommandOutput run_eval_segment(const SegmentEvalOptions& opts) {
  std::vector<std::pair<std::string, std::pair<fs::path, fs::path>>> pairs;
  if (fs::is_directory(opts.gt_path) && fs::is_directory(opts.pred_path)) {
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(opts.gt_path))
      if (e.is_regular_file()) names.insert(e.path().filename().string());
    if (names.empty())
      throw ValidationError(opts.gt_path.string() + ": no label files");
    for (const std::string& name : names) {
      const fs::path pred_file = opts.pred_path / name;
      if (!fs::exists(pred_file))
        throw ValidationError("missing prediction for '" + name + "'");
      pairs.push_back({name, {opts.gt_path / name, pred_file}});
    }
  } else {
    pairs.push_back({opts.pred_path.filename().string(),
                     {opts.gt_path, opts.pred_path}});
  }

  std::vector<detail::VideoScore> videos;
  for (const auto& [name, paths] : pairs)
    videos.push_back(detail::score_video(name, paths.first, paths.second, opts));

  Json j = detail::json_header("eval-segment");
  Json config;
  config["pred"] = opts.pred_path.string();
  config["gt"] = opts.gt_path.string();
  config["task_profile"] = std::string(to_string(opts.profile));
  config["exclude_background"] = opts.exclude_background;
  j["config"] = config;

  const std::vector<int> ks = {10, 25, 50};
  Json jvideos = Json::array();
  std::string csv = "video,f1_10,f1_25,f1_50,edit,acc\n";
  std::size_t frames_total = 0, frames_correct = 0;
  std::map<int, eval_segment::F1Counts> pooled;
  std::map<int, double> f1_sum;
  double edit_sum = 0, acc_sum = 0;
  for (const auto& v : videos) {
    Json vj;
    vj["video"] = v.name;
    vj["accuracy"] = v.score.accuracy;
    vj["edit"] = v.score.edit;
    Json f1;
    for (int k : ks) f1[std::to_string(k)] = v.score.f1.at(k);
    vj["f1"] = f1;
    jvideos.push_back(std::move(vj));
    csv += v.name;
    for (int k : ks) csv += "," + report::csv_number(v.score.f1.at(k));
    csv += "," + report::csv_number(v.score.edit) + "," +
           report::csv_number(v.score.accuracy) + "\n";
    frames_total += v.frames_total;
    frames_correct += v.frames_correct;
    for (int k : ks) {
      pooled[k] += v.counts.at(k);
      f1_sum[k] += v.score.f1.at(k);
    }
    edit_sum += v.score.edit;
    acc_sum += v.score.accuracy;
  }
  j["videos"] = jvideos;

  const double n = static_cast<double>(videos.size());
  Json agg;
  agg["accuracy_micro"] = frames_total == 0
                              ? 0.0
                              : 100.0 * static_cast<double>(frames_correct) /
                                    static_cast<double>(frames_total);
  agg["accuracy_macro"] = acc_sum / n;
  agg["edit_macro"] = edit_sum / n;
  Json f1_micro, f1_macro;
  for (int k : ks) {
    f1_micro[std::to_string(k)] = pooled[k].f1();
    f1_macro[std::to_string(k)] = f1_sum[k] / n;
  }
  agg["f1_micro"] = f1_micro;
  agg["f1_macro"] = f1_macro;
  j["aggregate"] = agg;

  csv += "micro";
  for (int k : ks) csv += "," + report::csv_number(pooled[k].f1());
  csv += ",," + report::csv_number(agg["accuracy_micro"].get<double>()) + "\n";
  return {std::move(j), std::move(csv), 0};
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct CompareOptions {
  fs::path a_path;
  fs::path b_path;
  std::string name_a = "Expert";
  std::string name_b = "Resident";
  std::string metric = "value";
  std::string task = "";
  double alpha = 0.05;
};

namespace detail {

inline std::vector<double> load_values(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
      line.pop_back();
    std::size_t start = 0;
    while (start < line.size() &&
           std::isspace(static_cast<unsigned char>(line[start])))
      ++start;
    if (start == line.size()) continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(line.substr(start), &used);
      if (used != line.size() - start) throw std::invalid_argument(line);
      values.push_back(v);
    } catch (const std::exception&) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": not a number: '" + line + "'");
    }
  }
  if (values.empty())
    throw ValidationError(path.string() + ": no values");
  return values;
}

}  // namespace detail

inline CommandOutput run_compare(const CompareOptions& opts) {
  const stats::SampleGroup a{opts.name_a, detail::load_values(opts.a_path)};
  const stats::SampleGroup b{opts.name_b, detail::load_values(opts.b_path)};
  const stats::TestResult r = stats::rank_sum_test(a, b, opts.alpha);

  Json j = detail::json_header("compare");
  Json config;
  config["a"] = opts.a_path.string();
  config["b"] = opts.b_path.string();
  config["name_a"] = opts.name_a;
  config["name_b"] = opts.name_b;
  config["alpha"] = opts.alpha;
  j["config"] = config;
  Json row;
  row["task"] = opts.task;
  row["metric"] = opts.metric;
  row["expert"] = detail::json_descriptive(stats::describe(a));
  row["resident"] = detail::json_descriptive(stats::describe(b));
  row["u"] = r.u_statistic;
  row["p"] = r.p_value;
  row["method"] = std::string(stats::to_string(r.method));
  row["significant"] = r.significant;
  j["test"] = row;
  return {std::move(j), "", 0};
}

// ---------------------------------------------------------------------------
// depth2gray
// ---------------------------------------------------------------------------

struct Depth2GrayOptions {
  fs::path dir_path;
  fs::path meta_path;  // defaults to dir/meta.json
  fs::path out_dir = "depth2gray-out";
  std::optional<double> near_m;
  std::optional<double> far_m;
};

inline CommandOutput run_depth2gray(const Depth2GrayOptions& opts) {
  const fs::path meta = opts.meta_path.empty() ? opts.dir_path / "meta.json"
                                               : opts.meta_path;
  const DepthSequence seq = ingest::load_depth_sequence(opts.dir_path, meta);
  viz::GrayscaleMapping mapping;
  std::string mode;
  if (opts.near_m && opts.far_m) {
    mapping = viz::GrayscaleMapping{*opts.near_m, *opts.far_m,
                                    seq.meta.depth_scale};
    mapping.validate();
    mode = "explicit";
  } else if (opts.near_m || opts.far_m) {
    throw ValidationError("--near and --far must be given together");
  } else {
    mapping = viz::auto_mapping(seq.frames.front(), seq.meta.depth_scale);
    mode = "auto-percentile-first-frame";
  }
  fs::create_directories(opts.out_dir);
  for (const DepthFrame& frame : seq.frames) {
    const auto gray = viz::depth_to_gray(frame, mapping);
    ingest::write_pgm8(opts.out_dir / ingest::frame_file_name(frame.index),
                       frame.width, frame.height, gray);
  }

  Json j = detail::json_header("depth2gray");
  Json config;
  config["dir"] = opts.dir_path.string();
  config["out_dir"] = opts.out_dir.string();
  j["config"] = config;
  Json m;
  m["near"] = mapping.near_m;
  m["far"] = mapping.far_m;
  m["depth_scale"] = mapping.depth_scale;
  m["normalization"] = mode;  // range frozen after the first frame
  m["frames"] = static_cast<int>(seq.frames.size());
  m["width"] = seq.meta.width;
  m["height"] = seq.meta.height;
  j["mapping"] = m;
  return {std::move(j), "", 0};
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

struct ValidateOptions {
  std::optional<fs::path> manifest;
  std::optional<fs::path> intrinsics;
  std::optional<fs::path> detections;
  std::optional<fs::path> labels;
  std::optional<fs::path> depth_dir;
  std::optional<fs::path> meta;
  TaskProfile profile = TaskProfile::SuturePad;
};

// Parses everything it is pointed at and reports per-input outcomes instead
// of stopping at the first problem. Exit code 2 when anything failed.
inline CommandOutput run_validate(const ValidateOptions& opts) {
  Json checks = Json::array();
  bool all_ok = true;
  auto check = [&](const char* kind, const fs::path& path, auto&& fn) {
    Json c;
    c["kind"] = kind;
    c["path"] = path.string();
    try {
      c["detail"] = fn();
      c["ok"] = true;
    } catch (const std::exception& e) {
      c["detail"] = std::string(e.what());
      c["ok"] = false;
      all_ok = false;
    }
    checks.push_back(std::move(c));
  };

  if (opts.intrinsics) {
    check("intrinsics", *opts.intrinsics, [&] {
      ingest::load_intrinsics(*opts.intrinsics);
      return std::string("ok");
    });
  }
  if (opts.detections) {
    check("detections", *opts.detections, [&] {
      const DetectionSet s = ingest::load_detections(*opts.detections);
      return std::to_string(s.items.size()) + " detections";
    });
  }
  if (opts.labels) {
    check("labels", *opts.labels, [&] {
      const LabelSequence l = ingest::load_labels(*opts.labels, opts.profile);
      return std::to_string(l.size()) + " frames";
    });
  }
  if (opts.depth_dir) {
    const fs::path meta = opts.meta ? *opts.meta : *opts.depth_dir / "meta.json";
    check("depth_sequence", *opts.depth_dir, [&] {
      const DepthSequence s = ingest::load_depth_sequence(*opts.depth_dir, meta);
      return std::to_string(s.frames.size()) + " frames, " +
             std::to_string(s.meta.width) + "x" + std::to_string(s.meta.height);
    });
  }
  if (opts.manifest) {
    check("manifest", *opts.manifest, [&] {
      const GroupManifest m = ingest::load_manifest(*opts.manifest);
      for (const ManifestEntry& e : m) {
        const DepthSequence seq = ingest::load_depth_sequence(e.depth_dir, e.meta);
        ingest::load_detections(e.detections);
        if (!e.labels.empty()) {
          const LabelSequence l = ingest::load_labels(e.labels, opts.profile);
          if (l.size() != seq.frames.size())
            throw ValidationError("participant '" + e.participant + "': " +
                                  std::to_string(l.size()) + " labels for " +
                                  std::to_string(seq.frames.size()) + " frames");
        }
      }
      return std::to_string(m.size()) + " participants";
    });
  }
  if (checks.empty())
    throw ValidationError("validate: nothing to check (pass --manifest, "
                          "--detections, --labels, --depth-dir, or --intrinsics)");

  Json j = detail::json_header("validate");
  j["checks"] = checks;
  j["ok"] = all_ok;
  return {std::move(j), "", all_ok ? 0 : 2};
}

}  // namespace skillgauge::pipeline
