#pragma once

// Object-detection evaluation: per-class AP and mAP averaged over IoU
// thresholds 0.50-0.95 in steps of 0.05.
//
// Matching is greedy per frame: detections sorted by descending confidence,
// each one takes the unmatched same-frame same-class ground-truth box with
// the highest IoU when that IoU clears the threshold. AP integrates the
// precision-recall curve with all-points interpolation (the precision
// envelope is made monotone non-increasing before summing). A class with no
// ground-truth instances has no defined AP and is excluded from the mAP mean.

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "skillgauge/errors.hpp"
#include "skillgauge/types.hpp"

namespace skillgauge::eval_detect {

struct DetectionEvalConfig {
  std::vector<double> iou_thresholds = default_thresholds();
  std::vector<ObjectClass> classes{kAllObjectClasses.begin(),
                                   kAllObjectClasses.end()};

  // 0.50, 0.55, ..., 0.95
  static std::vector<double> default_thresholds() {
    std::vector<double> t;
    for (int i = 0; i < 10; ++i) t.push_back(0.50 + 0.05 * i);
    return t;
  }

  void validate() const {
    if (iou_thresholds.empty())
      throw ValidationError("iou_thresholds must be non-empty");
    for (std::size_t i = 0; i < iou_thresholds.size(); ++i) {
      const double t = iou_thresholds[i];
      if (t <= 0.0 || t > 1.0)
        throw ValidationError("iou threshold outside (0,1]");
      if (i > 0 && iou_thresholds[i - 1] >= t)
        throw ValidationError("iou thresholds must be strictly increasing");
    }
    if (classes.empty()) throw ValidationError("class list must be non-empty");
  }
};

inline double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (ix <= 0 || iy <= 0) return 0.0;
  const double inter = ix * iy;
  return inter / (a.area() + b.area() - inter);
}

namespace detail {

// Descending confidence; ties broken by frame then box coordinates so the
// evaluation order (and thus the report) is deterministic.
inline bool detection_order(const Detection& a, const Detection& b) {
  const double ca = a.confidence.value_or(1.0);
  const double cb = b.confidence.value_or(1.0);
  if (ca != cb) return ca > cb;
  if (a.frame != b.frame) return a.frame < b.frame;
  if (a.box.x_min != b.box.x_min) return a.box.x_min < b.box.x_min;
  return a.box.y_min < b.box.y_min;
}

}  // namespace detail

// AP of one class at one IoU threshold. nullopt when the class has no
// ground-truth instances (undefined, excluded from mAP).
inline std::optional<double> average_precision(
    const std::vector<Detection>& detections,
    const std::vector<Detection>& ground_truth, ObjectClass cls,
    double iou_threshold) {
  std::vector<const Detection*> gts;
  for (const Detection& g : ground_truth)
    if (g.cls == cls) gts.push_back(&g);
  if (gts.empty()) return std::nullopt;

  std::vector<Detection> dets;
  for (const Detection& d : detections) {
    if (d.cls != cls) continue;
    if (!d.confidence)
      throw ValidationError("average_precision: detection without confidence");
    dets.push_back(d);
  }
  if (dets.empty()) return 0.0;
  std::sort(dets.begin(), dets.end(), detail::detection_order);

  std::vector<bool> gt_matched(gts.size(), false);
  const std::size_t n = dets.size();
  std::vector<double> recall(n), precision(n);
  int tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (gt_matched[j] || gts[j]->frame != dets[i].frame) continue;
      const double v = iou(dets[i].box, gts[j]->box);
      if (v > best_iou) {
        best_iou = v;
        best = static_cast<int>(j);
      }
    }
    if (best >= 0 && best_iou >= iou_threshold) {
      gt_matched[static_cast<std::size_t>(best)] = true;
      ++tp;
    }
    recall[i] = static_cast<double>(tp) / static_cast<double>(gts.size());
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }

  // Monotone envelope, then sum precision over recall increments.
  for (std::size_t i = n - 1; i-- > 0;)
    precision[i] = std::max(precision[i], precision[i + 1]);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

struct ClassAP {
  int occurrences = 0;                    // ground-truth instances
  std::vector<double> ap_per_threshold;   // empty when occurrences == 0
  std::optional<double> ap_mean;          // AP_50_95: mean over thresholds
};

struct APTable {
  std::vector<double> thresholds;
  std::map<ObjectClass, ClassAP> per_class;
  std::optional<double> map_mean;  // mAP_50_95: mean over classes with GT
};

// Full sweep: AP per class per threshold, per-class mean, unweighted mean
// over the classes that have at least one ground-truth instance.
inline APTable map_50_95(const DetectionSet& detections,
                         const DetectionSet& ground_truth,
                         const DetectionEvalConfig& config = {}) {
  config.validate();
  if (ground_truth.items.empty())
    throw ValidationError("map_50_95: ground-truth set is empty");

  APTable table;
  table.thresholds = config.iou_thresholds;
  double class_sum = 0.0;
  int class_count = 0;
  for (ObjectClass cls : config.classes) {
    ClassAP row;
    for (const Detection& g : ground_truth.items)
      if (g.cls == cls) ++row.occurrences;
    if (row.occurrences > 0) {
      double sum = 0.0;
      for (double t : config.iou_thresholds) {
        const auto ap =
            average_precision(detections.items, ground_truth.items, cls, t);
        row.ap_per_threshold.push_back(*ap);
        sum += *ap;
      }
      row.ap_mean = sum / static_cast<double>(config.iou_thresholds.size());
      class_sum += *row.ap_mean;
      ++class_count;
    }
    table.per_class.emplace(cls, std::move(row));
  }
  if (class_count > 0) table.map_mean = class_sum / class_count;
  return table;
}

// Diagnostic sweep over confidence cuts (the metric the detector was tuned
// with upstream): pooled TP/FP/FN at a fixed IoU threshold for detections
// with confidence >= cut.
struct ConfidenceSweepRow {
  double confidence = 0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double precision = 0;
  double recall = 0;
};

inline std::vector<ConfidenceSweepRow> confidence_sweep(
    const DetectionSet& detections, const DetectionSet& ground_truth,
    const std::vector<ObjectClass>& classes, double iou_threshold = 0.5,
    const std::vector<double>& cuts = DetectionEvalConfig::default_thresholds()) {
  std::vector<ConfidenceSweepRow> rows;
  for (double cut : cuts) {
    ConfidenceSweepRow row;
    row.confidence = cut;
    for (ObjectClass cls : classes) {
      std::vector<const Detection*> gts;
      for (const Detection& g : ground_truth.items)
        if (g.cls == cls) gts.push_back(&g);
      std::vector<Detection> dets;
      for (const Detection& d : detections.items)
        if (d.cls == cls && d.confidence.value_or(1.0) >= cut)
          dets.push_back(d);
      std::sort(dets.begin(), dets.end(), detail::detection_order);
      std::vector<bool> matched(gts.size(), false);
      for (const Detection& d : dets) {
        int best = -1;
        double best_iou = 0.0;
        for (std::size_t j = 0; j < gts.size(); ++j) {
          if (matched[j] || gts[j]->frame != d.frame) continue;
          const double v = iou(d.box, gts[j]->box);
          if (v > best_iou) {
            best_iou = v;
            best = static_cast<int>(j);
          }
        }
        if (best >= 0 && best_iou >= iou_threshold) {
          matched[static_cast<std::size_t>(best)] = true;
          ++row.tp;
        } else {
          ++row.fp;
        }
      }
      for (bool m : matched)
        if (!m) ++row.fn;
    }
    row.precision = (row.tp + row.fp) ? static_cast<double>(row.tp) / (row.tp + row.fp) : 0.0;
    row.recall = (row.tp + row.fn) ? static_cast<double>(row.tp) / (row.tp + row.fn) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace skillgauge::eval_detect
