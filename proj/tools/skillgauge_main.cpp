// skillgauge — depth-camera surgical-skill analytics.
//
// Subcommands: path3d, gesture-dist, project2d, eval-detect, eval-segment,
// compare, depth2gray, validate. Reports are deterministic JSON (optional
// CSV); stdout carries nothing but the report path, diagnostics go to
// stderr. Exit codes: 0 success, 2 validation/parse error, 3 degenerate
// statistics.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "skillgauge/errors.hpp"
#include "skillgauge/log.hpp"
#include "skillgauge/pipeline.hpp"
#include "skillgauge/report.hpp"
#include "skillgauge/version.hpp"

namespace fs = std::filesystem;
using namespace skillgauge;

namespace {

struct GlobalFlags {
  std::string intrinsics;
  std::string gap_policy = "bridge";
  int window = 5;
  int jobs = 1;
  std::string out;
  bool csv = false;
};

void add_common_flags(CLI::App* cmd, GlobalFlags& flags) {
  cmd->add_option("--intrinsics", flags.intrinsics,
                  "intrinsics.json with fx, fy, cx, cy, depth_scale");
  cmd->add_option("--gap-policy", flags.gap_policy,
                  "gap handling: bridge or skip")
      ->check(CLI::IsMember({"bridge", "skip"}));
  cmd->add_option("--window", flags.window,
                  "odd depth-sampling window in pixels")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--jobs", flags.jobs, "max concurrent participants")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", flags.out, "report path (default <command>-report.json)");
  cmd->add_flag("--csv", flags.csv, "also write a CSV next to the report");
}

fs::path report_path(const GlobalFlags& flags, const std::string& command) {
  return flags.out.empty() ? fs::path(command + "-report.json")
                           : fs::path(flags.out);
}

// Writes the finished report (and CSV if asked) and prints the report path —
// the only thing this tool ever prints to stdout.
void emit(const pipeline::CommandOutput& output, const fs::path& out,
          bool want_csv) {
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  {
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot write '" + out.string() + "'");
    f << report::canonical_dump(output.report);
  }
  if (want_csv && !output.csv.empty()) {
    fs::path csv_path = out;
    csv_path.replace_extension(".csv");
    std::ofstream f(csv_path, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot write '" + csv_path.string() + "'");
    f << output.csv;
  }
  std::cout << out.string() << "\n";
}

std::vector<ObjectClass> parse_class_list(const std::string& csv_names) {
  std::vector<ObjectClass> classes;
  std::size_t pos = 0;
  while (pos <= csv_names.size()) {
    std::size_t comma = csv_names.find(',', pos);
    if (comma == std::string::npos) comma = csv_names.size();
    std::string name = csv_names.substr(pos, comma - pos);
    while (!name.empty() && name.front() == ' ') name.erase(name.begin());
    while (!name.empty() && name.back() == ' ') name.pop_back();
    if (!name.empty()) {
      try {
        classes.push_back(parse_object_class(name));
      } catch (const ParseError& e) {
        throw ValidationError(e.what());
      }
    }
    pos = comma + 1;
  }
  if (classes.empty()) throw ValidationError("--classes: empty class list");
  return classes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"depth-camera surgical-skill analytics"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  GlobalFlags flags;

  // path3d / project2d / gesture-dist -------------------------------------
  std::string manifest_arg;
  int smooth = 0;
  double alpha = 0.05;
  std::string dump_dir;
  std::string profile_name = "suture-pad";

  auto add_path_command = [&](const char* name, const char* desc,
                              bool with_profile) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->add_option("manifest", manifest_arg, "group manifest JSON")->required();
    add_common_flags(cmd, flags);
    cmd->add_option("--smooth", smooth,
                    "odd moving-average window over sample points (0 = off)");
    cmd->add_option("--alpha", alpha, "significance level");
    cmd->add_option("--dump-traj", dump_dir,
                    "directory for per-participant trajectory JSONL dumps");
    if (with_profile)
      cmd->add_option("--task-profile", profile_name,
                      "label profile: suture-pad or fascia")
          ->check(CLI::IsMember({"suture-pad", "fascia"}));
    return cmd;
  };
  CLI::App* cmd_path3d = add_path_command(
      "path3d", "3D hand path lengths and expert/resident comparison", false);
  CLI::App* cmd_project2d = add_path_command(
      "project2d", "planar (XY/YZ/XZ) path-length table and comparisons", false);
  CLI::App* cmd_gesture = add_path_command(
      "gesture-dist", "per-gesture hand travel and comparisons", true);

  // eval-detect ------------------------------------------------------------
  std::string pred_arg, gt_arg, classes_arg;
  bool conf_sweep = false;
  CLI::App* cmd_detect = app.add_subcommand(
      "eval-detect", "per-class AP and mAP over IoU 0.50-0.95");
  cmd_detect->add_option("predictions", pred_arg, "detections JSONL")->required();
  cmd_detect->add_option("ground_truth", gt_arg, "ground-truth JSONL")->required();
  add_common_flags(cmd_detect, flags);
  cmd_detect->add_option("--classes", classes_arg,
                         "comma-separated class filter, e.g. \"Left Hand,Right Hand\"");
  cmd_detect->add_flag("--conf-sweep", conf_sweep,
                       "add a confidence-threshold diagnostic sweep");

  // eval-segment -----------------------------------------------------------
  bool exclude_background = false;
  CLI::App* cmd_segment = app.add_subcommand(
      "eval-segment", "frame accuracy, segmental edit score, F1@{10,25,50}");
  cmd_segment->add_option("predictions", pred_arg, "label file or directory")
      ->required();
  cmd_segment->add_option("ground_truth", gt_arg, "label file or directory")
      ->required();
  add_common_flags(cmd_segment, flags);
  cmd_segment
      ->add_option("--task-profile", profile_name,
                   "label profile: suture-pad or fascia")
      ->check(CLI::IsMember({"suture-pad", "fascia"}));
  cmd_segment->add_flag("--exclude-background", exclude_background,
                        "drop G6 from scoring (alternative convention)");

  // compare ----------------------------------------------------------------
  std::string a_arg, b_arg, name_a = "Expert", name_b = "Resident";
  std::string metric_name = "value", task_name;
  CLI::App* cmd_compare = app.add_subcommand(
      "compare", "rank-sum test over two externally supplied value lists");
  cmd_compare->add_option("group_a", a_arg, "values, one per line")->required();
  cmd_compare->add_option("group_b", b_arg, "values, one per line")->required();
  add_common_flags(cmd_compare, flags);
  cmd_compare->add_option("--name-a", name_a, "first group name");
  cmd_compare->add_option("--name-b", name_b, "second group name");
  cmd_compare->add_option("--metric", metric_name, "metric label for the report");
  cmd_compare->add_option("--task", task_name, "task label for the report");
  cmd_compare->add_option("--alpha", alpha, "significance level");

  // depth2gray -------------------------------------------------------------
  std::string dir_arg, meta_arg, gray_out = "depth2gray-out";
  double near_m = 0, far_m = 0;
  CLI::App* cmd_gray = app.add_subcommand(
      "depth2gray", "export depth frames as 8-bit grayscale PGMs");
  cmd_gray->add_option("depth_dir", dir_arg, "directory of frame_%06d.pgm")
      ->required();
  cmd_gray->add_option("--meta", meta_arg, "meta.json (default depth_dir/meta.json)");
  CLI::Option* near_opt =
      cmd_gray->add_option("--near", near_m, "white point in meters");
  CLI::Option* far_opt =
      cmd_gray->add_option("--far", far_m, "black point in meters");
  cmd_gray->add_option("--out", gray_out, "output directory");

  // validate ---------------------------------------------------------------
  std::string v_manifest, v_intrinsics, v_detections, v_labels, v_depth, v_meta;
  CLI::App* cmd_validate =
      app.add_subcommand("validate", "parse inputs and report problems");
  cmd_validate->add_option("--manifest", v_manifest, "group manifest JSON");
  cmd_validate->add_option("--intrinsics", v_intrinsics, "intrinsics JSON");
  cmd_validate->add_option("--detections", v_detections, "detections JSONL");
  cmd_validate->add_option("--labels", v_labels, "label file");
  cmd_validate->add_option("--depth-dir", v_depth, "depth frame directory");
  cmd_validate->add_option("--meta", v_meta, "meta.json for --depth-dir");
  cmd_validate
      ->add_option("--task-profile", profile_name,
                   "label profile: suture-pad or fascia")
      ->check(CLI::IsMember({"suture-pad", "fascia"}));
  cmd_validate->add_option("--out", flags.out, "validation report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto path_options = [&]() {
      pipeline::PathOptions opts;
      opts.manifest_path = manifest_arg;
      opts.intrinsics_path = flags.intrinsics;
      opts.gap_policy = motion::parse_gap_policy(flags.gap_policy);
      opts.window = flags.window;
      opts.smooth = smooth;
      opts.jobs = flags.jobs;
      opts.alpha = alpha;
      opts.profile = parse_task_profile(profile_name);
      if (!dump_dir.empty()) opts.dump_dir = fs::path(dump_dir);
      return opts;
    };

    if (*cmd_path3d) {
      emit(pipeline::run_path3d(path_options()), report_path(flags, "path3d"),
           flags.csv);
    } else if (*cmd_project2d) {
      emit(pipeline::run_project2d(path_options()),
           report_path(flags, "project2d"), flags.csv);
    } else if (*cmd_gesture) {
      emit(pipeline::run_gesture_dist(path_options()),
           report_path(flags, "gesture-dist"), flags.csv);
    } else if (*cmd_detect) {
      pipeline::DetectEvalOptions opts;
      opts.pred_path = pred_arg;
      opts.gt_path = gt_arg;
      if (!classes_arg.empty()) opts.config.classes = parse_class_list(classes_arg);
      opts.conf_sweep = conf_sweep;
      emit(pipeline::run_eval_detect(opts), report_path(flags, "eval-detect"),
           flags.csv);
    } else if (*cmd_segment) {
      pipeline::SegmentEvalOptions opts;
      opts.pred_path = pred_arg;
      opts.gt_path = gt_arg;
      opts.profile = parse_task_profile(profile_name);
      opts.exclude_background = exclude_background;
      emit(pipeline::run_eval_segment(opts), report_path(flags, "eval-segment"),
           flags.csv);
    } else if (*cmd_compare) {
      pipeline::CompareOptions opts;
      opts.a_path = a_arg;
      opts.b_path = b_arg;
      opts.name_a = name_a;
      opts.name_b = name_b;
      opts.metric = metric_name;
      opts.task = task_name;
      opts.alpha = alpha;
      emit(pipeline::run_compare(opts), report_path(flags, "compare"), flags.csv);
    } else if (*cmd_gray) {
      pipeline::Depth2GrayOptions opts;
      opts.dir_path = dir_arg;
      if (!meta_arg.empty()) opts.meta_path = meta_arg;
      opts.out_dir = gray_out;
      if (*near_opt) opts.near_m = near_m;
      if (*far_opt) opts.far_m = far_m;
      const auto output = pipeline::run_depth2gray(opts);
      emit(output, opts.out_dir / "gray_meta.json", false);
    } else if (*cmd_validate) {
      pipeline::ValidateOptions opts;
      if (!v_manifest.empty()) opts.manifest = v_manifest;
      if (!v_intrinsics.empty()) opts.intrinsics = v_intrinsics;
      if (!v_detections.empty()) opts.detections = v_detections;
      if (!v_labels.empty()) opts.labels = v_labels;
      if (!v_depth.empty()) opts.depth_dir = v_depth;
      if (!v_meta.empty()) opts.meta = v_meta;
      opts.profile = parse_task_profile(profile_name);
      const auto output = pipeline::run_validate(opts);
      if (!flags.out.empty()) {
        emit(output, flags.out, false);
      } else if (output.exit_code != 0) {
        for (const auto& c : output.report["checks"]) {
          if (!c["ok"].get<bool>())
            std::cerr << c["kind"].get<std::string>() << ": "
                      << c["detail"].get<std::string>() << "\n";
        }
      }
      return output.exit_code;
    }
    return 0;
  } catch (const DegenerateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
