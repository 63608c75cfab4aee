#pragma once

// Temporal action-segmentation metrics: frame-wise accuracy, segmental edit
// distance, and F1@k for k in {10, 25, 50}.
//
// Segments are maximal runs of equal labels. The edit score is a Levenshtein
// distance over segment label order (durations ignored) normalized by the
// longer of the two segmentations. F1@k matches predicted segments to
// same-label ground-truth segments greedily in temporal order by frame
// interval IoU; each ground-truth segment can be consumed once.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "skillgauge/errors.hpp"
#include "skillgauge/types.hpp"

namespace skillgauge::eval_segment {

struct Segment {
  GestureLabel label = GestureLabel::G0;
  int start = 0;  // inclusive
  int end = 0;    // inclusive

  int length() const { return end - start + 1; }

  friend bool operator==(const Segment&, const Segment&) = default;
};

using SegmentSequence = std::vector<Segment>;

// Run-length encoding; concatenating the segments reproduces the input.
inline SegmentSequence to_segments(const LabelSequence& labels) {
  SegmentSequence segments;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
    if (segments.empty() || segments.back().label != labels[static_cast<std::size_t>(i)]) {
      segments.push_back({labels[static_cast<std::size_t>(i)], i, i});
    } else {
      segments.back().end = i;
    }
  }
  return segments;
}

inline double frame_accuracy(const LabelSequence& gt,
                             const LabelSequence& pred) {
  if (gt.size() != pred.size())
    throw ValidationError("frame_accuracy: length mismatch (" +
                          std::to_string(gt.size()) + " vs " +
                          std::to_string(pred.size()) + ")");
  if (gt.empty()) throw ValidationError("frame_accuracy: empty sequences");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gt.size(); ++i)
    if (gt[i] == pred[i]) ++correct;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(gt.size());
}

namespace detail {

// Unit-cost Levenshtein over segment labels, two-row DP.
inline int levenshtein(const SegmentSequence& a, const SegmentSequence& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const int sub = prev[j - 1] + (a[i - 1].label == b[j - 1].label ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

inline double interval_iou(const Segment& a, const Segment& b) {
  const int inter = std::min(a.end, b.end) - std::max(a.start, b.start) + 1;
  if (inter <= 0) return 0.0;
  const int uni = a.length() + b.length() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace detail

// 100 * (1 - distance / max(|gt|, |pred|)); both empty compares as identical.
inline double edit_score(const SegmentSequence& gt,
                         const SegmentSequence& pred) {
  const std::size_t denom = std::max(gt.size(), pred.size());
  if (denom == 0) return 100.0;
  return 100.0 * (1.0 - static_cast<double>(detail::levenshtein(gt, pred)) /
                            static_cast<double>(denom));
}

struct F1Counts {
  int tp = 0;
  int fp = 0;
  int fn = 0;

  F1Counts& operator+=(const F1Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }

  double f1() const {
    const int denom = 2 * tp + fp + fn;
    return denom == 0 ? 0.0 : 200.0 * tp / static_cast<double>(denom);
  }
};

// k is an overlap percentage in (0,100). Predictions are processed in
// temporal order; each takes the unmatched same-label ground-truth segment
// with the highest IoU (earliest on ties) when that IoU reaches k/100.
inline F1Counts f1_counts(const SegmentSequence& gt, const SegmentSequence& pred,
                          double k) {
  if (k <= 0.0 || k >= 100.0)
    throw ValidationError("f1_at_k: k must be in (0,100)");
  const double threshold = k / 100.0;
  F1Counts counts;
  std::vector<bool> matched(gt.size(), false);
  for (const Segment& p : pred) {
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t j = 0; j < gt.size(); ++j) {
      if (matched[j] || gt[j].label != p.label) continue;
      const double v = detail::interval_iou(p, gt[j]);
      if (v > best_iou) {
        best_iou = v;
        best = static_cast<int>(j);
      }
    }
    if (best >= 0 && best_iou >= threshold) {
      matched[static_cast<std::size_t>(best)] = true;
      ++counts.tp;
    } else {
      ++counts.fp;
    }
  }
  for (bool m : matched)
    if (!m) ++counts.fn;
  return counts;
}

inline double f1_at_k(const SegmentSequence& gt, const SegmentSequence& pred,
                      double k) {
  return f1_counts(gt, pred, k).f1();
}

struct SegmentationScore {
  double accuracy = 0;
  double edit = 0;
  std::map<int, double> f1;  // k -> score
};

struct ScoreOptions {
  std::vector<int> f1_ks = {10, 25, 50};
  // When set, G6 frames are ignored for accuracy and G6 segments are dropped
  // from both sides before edit and F1 (the alternative convention; the
  // default treats G6 as an ordinary label).
  bool exclude_background = false;
};

inline SegmentSequence without_background(const SegmentSequence& segments) {
  SegmentSequence out;
  for (const Segment& s : segments)
    if (s.label != GestureLabel::G6) out.push_back(s);
  return out;
}

inline SegmentationScore score_segmentation(const LabelSequence& gt,
                                            const LabelSequence& pred,
                                            const ScoreOptions& opts = {}) {
  if (gt.size() != pred.size())
    throw ValidationError("score_segmentation: length mismatch (" +
                          std::to_string(gt.size()) + " vs " +
                          std::to_string(pred.size()) + ")");
  SegmentationScore score;
  if (opts.exclude_background) {
    std::size_t total = 0, correct = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      if (gt[i] == GestureLabel::G6) continue;
      ++total;
      if (gt[i] == pred[i]) ++correct;
    }
    score.accuracy = total == 0 ? 0.0 : 100.0 * static_cast<double>(correct) /
                                            static_cast<double>(total);
  } else {
    score.accuracy = frame_accuracy(gt, pred);
  }
  SegmentSequence gs = to_segments(gt);
  SegmentSequence ps = to_segments(pred);
  if (opts.exclude_background) {
    gs = without_background(gs);
    ps = without_background(ps);
  }
  score.edit = edit_score(gs, ps);
  for (int k : opts.f1_ks) score.f1[k] = f1_at_k(gs, ps, k);
  return score;
}

}  // namespace skillgauge::eval_segment
