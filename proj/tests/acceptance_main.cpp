// Acceptance suite. Each criterion prints exactly one [PASS]/[FAIL] line;
// the process exits with the number of failed criteria. Oracles here are
// written independently of the library code they check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "skillgauge/eval_detect.hpp"
#include "skillgauge/eval_segment.hpp"
#include "skillgauge/geometry.hpp"
#include "skillgauge/motion.hpp"
#include "skillgauge/pipeline.hpp"
#include "skillgauge/report.hpp"
#include "skillgauge/stats.hpp"
#include "skillgauge/viz.hpp"
#include "support/synthetic.hpp"
#include "support/tempdir.hpp"

using namespace skillgauge;
using geometry::Point3;
using geometry::Trajectory3D;
using Clock = std::chrono::steady_clock;

namespace {

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw CheckFailure(msg);
}

struct Harness {
  int failures = 0;

  void criterion(int id, const char* name,
                 const std::function<std::string()>& fn) {
    const auto t0 = Clock::now();
    try {
      const std::string detail = fn();
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          Clock::now() - t0)
                          .count();
      std::printf("[PASS] %2d %-24s %s (%lld ms)\n", id, name, detail.c_str(),
                  static_cast<long long>(ms));
    } catch (const std::exception& e) {
      ++failures;
      std::printf("[FAIL] %2d %-24s %s\n", id, name, e.what());
    }
    std::fflush(stdout);
  }
};

// ---------------------------------------------------------------------------
// shared generators
// ---------------------------------------------------------------------------

Trajectory3D random_trajectory(std::mt19937& rng, int max_samples,
                               bool allow_gaps) {
  std::uniform_int_distribution<int> n_dist(1, max_samples);
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  std::uniform_real_distribution<double> z(0.2, 3.0);
  std::uniform_int_distribution<int> gap(0, 4);
  const int n = n_dist(rng);
  Trajectory3D t;
  int frame = 0;
  for (int i = 0; i < n; ++i) {
    if (allow_gaps && i > 0) {
      const int hole = gap(rng) == 0 ? gap(rng) : 0;
      for (int g = 0; g < hole; ++g) t.gaps.push_back(frame++);
    }
    t.samples.push_back({frame++, {c(rng), c(rng), z(rng)}});
  }
  t.frame_count = frame;
  return t;
}

// ---------------------------------------------------------------------------
// criterion 1: geometry round trip
// ---------------------------------------------------------------------------

std::string check_geometry_round_trip() {
  const CameraIntrinsics intr{504.5, 503.2, 321.7, 238.4, 0.00025};
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> u_dist(0, 639), v_dist(0, 479);
  std::uniform_real_distribution<double> d_dist(1, 65535);
  const auto t0 = Clock::now();
  double max_rel = 0;
  for (int i = 0; i < 10000; ++i) {
    const double u = u_dist(rng), v = v_dist(rng), d = d_dist(rng);
    const Point3 p = geometry::deproject(u, v, d, intr);
    const double u_back = p.x * intr.fx / p.z + intr.cx;
    const double v_back = p.y * intr.fy / p.z + intr.cy;
    const double d_back = p.z / intr.depth_scale;
    max_rel = std::max(max_rel, std::abs(u_back - u) / std::max(1.0, u));
    max_rel = std::max(max_rel, std::abs(v_back - v) / std::max(1.0, v));
    max_rel = std::max(max_rel, std::abs(d_back - d) / d);
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  require(max_rel <= 1e-9, "round-trip max relative error " +
                               std::to_string(max_rel));
  require(secs < 1.0, "took " + std::to_string(secs) + " s (limit 1 s)");
  std::ostringstream os;
  os << "10000 triples, max rel err " << max_rel;
  return os.str();
}

// ---------------------------------------------------------------------------
// criterion 2: path-length oracle
// ---------------------------------------------------------------------------

std::string check_path_length_oracle() {
  std::mt19937 rng(102);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto t = random_trajectory(rng, 500, trial % 2 == 0);
    // naive oracle: straight pairwise Euclidean sum over samples, in order
    double naive = 0.0;
    for (std::size_t i = 0; i + 1 < t.samples.size(); ++i) {
      const double dx = t.samples[i + 1].p.x - t.samples[i].p.x;
      const double dy = t.samples[i + 1].p.y - t.samples[i].p.y;
      const double dz = t.samples[i + 1].p.z - t.samples[i].p.z;
      naive += std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    const double got =
        motion::path_length_3d(t, motion::GapPolicy::Bridge).length_3d;
    require(got == naive, "trajectory " + std::to_string(trial) +
                              ": length mismatch vs naive summation");
  }
  std::mt19937 rng2(103);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Point3 origin{c(rng2), c(rng2), c(rng2) + 2.0};
    const Point3 dir{c(rng2) + 0.1, c(rng2), c(rng2)};
    Trajectory3D t;
    const int n = 100;
    for (int i = 0; i <= n; ++i) {
      const double s = static_cast<double>(i) / n;
      t.samples.push_back({i, {origin.x + s * dir.x, origin.y + s * dir.y,
                               origin.z + s * dir.z}});
    }
    t.frame_count = n + 1;
    const double endpoint =
        std::sqrt(dir.x * dir.x + dir.y * dir.y + dir.z * dir.z);
    const double got = motion::path_length_3d(t).length_3d;
    require(std::abs(got - endpoint) <= 1e-12 * endpoint,
            "straight line deviates beyond 1e-12 relative");
  }
  return "1000 random trajectories bit-exact, 200 straight lines tight";
}

// ---------------------------------------------------------------------------
// criterion 3: planar dominance
// ---------------------------------------------------------------------------

std::string check_planar_dominance() {
  std::mt19937 rng(104);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto t = random_trajectory(rng, 300, true);
    const auto m = motion::path_length_3d(t);
    require(m.length_xy <= m.length_3d, "XY exceeds 3D");
    require(m.length_yz <= m.length_3d, "YZ exceeds 3D");
    require(m.length_xz <= m.length_3d, "XZ exceeds 3D");
  }
  // adversarial out-of-plane fixture: steps of 1 in x vs 3 in z
  Trajectory3D t;
  for (int i = 0; i <= 40; ++i)
    t.samples.push_back({i, {static_cast<double>(i), 0.0, 1.0 + 3.0 * (i % 2)}});
  t.frame_count = 41;
  const auto m = motion::path_length_3d(t);
  const double ratio = m.length_xy / m.length_3d;
  require(ratio <= 2.0 / 3.0,
          "adversarial XY/3D ratio " + std::to_string(ratio) + " > 2/3");
  std::ostringstream os;
  os << "1000 trajectories dominated, adversarial XY/3D = " << ratio;
  return os.str();
}

// ---------------------------------------------------------------------------
// criterion 4: gesture partition
// ---------------------------------------------------------------------------

std::string check_gesture_partition() {
  std::mt19937 rng(105);
  std::uniform_int_distribution<int> pick(0, 7);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto t = random_trajectory(rng, 300, false);  // no gaps
    LabelSequence labels;
    for (int i = 0; i < t.frame_count; ++i)
      labels.push_back(kAllGestureLabels[static_cast<std::size_t>(pick(rng))]);
    const auto dist =
        motion::gesture_distances(t, labels, motion::GapPolicy::Bridge);
    double sum = 0;
    for (const auto& [g, d] : dist) sum += d.distance;
    const double total =
        motion::path_length_3d(t, motion::GapPolicy::Bridge).length_3d;
    const double rel = total == 0 ? std::abs(sum)
                                  : std::abs(sum - total) / total;
    worst = std::max(worst, rel);
    require(rel <= 1e-9, "partition off by relative " + std::to_string(rel));
  }
  std::ostringstream os;
  os << "1000 pairs, worst relative gap " << worst;
  return os.str();
}

// ---------------------------------------------------------------------------
// criterion 5: detection eval oracle
// ---------------------------------------------------------------------------

double grid_iou(const BoundingBox& a, const BoundingBox& b) {
  int inter = 0, uni = 0;
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      const bool in_a =
          x >= a.x_min && x + 1 <= a.x_max && y >= a.y_min && y + 1 <= a.y_max;
      const bool in_b =
          x >= b.x_min && x + 1 <= b.x_max && y >= b.y_min && y + 1 <= b.y_max;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

double oracle_ap(std::vector<Detection> dets, const std::vector<Detection>& gts,
                 double iou_t) {
  std::sort(dets.begin(), dets.end(),
            [](const Detection& a, const Detection& b) {
              return *a.confidence > *b.confidence;
            });
  const std::size_t n = dets.size();
  std::vector<double> recall(n), precision(n);
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<bool> used(gts.size(), false);
    int tp = 0;
    for (std::size_t i = 0; i < k; ++i) {
      int best = -1;
      double best_v = 0;
      for (std::size_t j = 0; j < gts.size(); ++j) {
        if (used[j] || gts[j].frame != dets[i].frame) continue;
        const double v = eval_detect::iou(dets[i].box, gts[j].box);
        if (v > best_v) {
          best_v = v;
          best = static_cast<int>(j);
        }
      }
      if (best >= 0 && best_v >= iou_t) {
        used[static_cast<std::size_t>(best)] = true;
        ++tp;
      }
    }
    recall[k - 1] = static_cast<double>(tp) / static_cast<double>(gts.size());
    precision[k - 1] = static_cast<double>(tp) / static_cast<double>(k);
  }
  double ap = 0, prev = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double env = 0;
    for (std::size_t j = k; j < n; ++j) env = std::max(env, precision[j]);
    ap += (recall[k] - prev) * env;
    prev = recall[k];
  }
  return ap;
}

std::string check_detection_oracle() {
  std::mt19937 rng(106);
  std::uniform_int_distribution<int> lo(0, 24);
  std::uniform_int_distribution<int> len(1, 8);
  std::uniform_int_distribution<int> frame(0, 1);
  std::uniform_real_distribution<double> conf(0.01, 0.99);

  auto random_box = [&] {
    const int x = lo(rng), y = lo(rng);
    return BoundingBox{static_cast<double>(x), static_cast<double>(y),
                       static_cast<double>(x + len(rng)),
                       static_cast<double>(y + len(rng))};
  };

  // IoU vs pixel-grid counting
  double worst_iou = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const BoundingBox a = random_box(), b = random_box();
    const double diff = std::abs(eval_detect::iou(a, b) - grid_iou(a, b));
    worst_iou = std::max(worst_iou, diff);
    require(diff <= 1e-9, "IoU deviates from grid counting by " +
                              std::to_string(diff));
  }

  // AP vs the exhaustive PR oracle across every (n_det, n_gt) size
  int instances = 0;
  const auto thresholds = eval_detect::DetectionEvalConfig::default_thresholds();
  for (int n_gt = 1; n_gt <= 3; ++n_gt) {
    for (int n_det = 0; n_det <= 5; ++n_det) {
      for (int rep = 0; rep < 120; ++rep) {
        std::vector<Detection> gts, dets;
        for (int i = 0; i < n_gt; ++i) {
          Detection g;
          g.frame = frame(rng);
          g.cls = ObjectClass::LeftHand;
          g.box = random_box();
          gts.push_back(g);
        }
        std::vector<double> seen;
        for (int i = 0; i < n_det; ++i) {
          Detection d;
          d.frame = frame(rng);
          d.cls = ObjectClass::LeftHand;
          double c;
          do {
            c = conf(rng);
          } while (std::find(seen.begin(), seen.end(), c) != seen.end());
          seen.push_back(c);
          d.confidence = c;
          d.box = random_box();
          dets.push_back(d);
        }
        ++instances;
        for (double t : {thresholds[0], thresholds[4], thresholds[9]}) {
          const auto ap = eval_detect::average_precision(
              dets, gts, ObjectClass::LeftHand, t);
          const double expected = dets.empty() ? 0.0 : oracle_ap(dets, gts, t);
          require(*ap == expected,
                  "AP mismatch vs exhaustive oracle (n_det=" +
                      std::to_string(n_det) + ", n_gt=" + std::to_string(n_gt) +
                      ")");
        }
        if (!dets.empty()) {
          DetectionSet ds, gs;
          ds.items = dets;
          gs.items = gts;
          eval_detect::DetectionEvalConfig config;
          config.classes = {ObjectClass::LeftHand};
          const auto table = eval_detect::map_50_95(ds, gs, config);
          const auto& row = table.per_class.at(ObjectClass::LeftHand);
          double sum = 0;
          for (double ap : row.ap_per_threshold) sum += ap;
          const double mean = sum / static_cast<double>(thresholds.size());
          require(*row.ap_mean == mean, "AP_50_95 is not the threshold mean");
          require(*table.map_mean == mean, "mAP is not the class mean");
        }
      }
    }
  }
  std::ostringstream os;
  os << instances << " instances exact, worst IoU diff " << worst_iou;
  return os.str();
}

// ---------------------------------------------------------------------------
// criterion 6: segmentation metric oracles
// ---------------------------------------------------------------------------

int recursive_lev(const eval_segment::SegmentSequence& a,
                  const eval_segment::SegmentSequence& b, std::size_t i,
                  std::size_t j) {
  if (i == 0) return static_cast<int>(j);
  if (j == 0) return static_cast<int>(i);
  const int sub = recursive_lev(a, b, i - 1, j - 1) +
                  (a[i - 1].label == b[j - 1].label ? 0 : 1);
  return std::min({recursive_lev(a, b, i - 1, j) + 1,
                   recursive_lev(a, b, i, j - 1) + 1, sub});
}

void check_edit_pair(const LabelSequence& gt, const LabelSequence& pred) {
  const auto gs = eval_segment::to_segments(gt);
  const auto ps = eval_segment::to_segments(pred);
  const int d = recursive_lev(gs, ps, gs.size(), ps.size());
  const double expected =
      100.0 * (1.0 - static_cast<double>(d) /
                         static_cast<double>(std::max(gs.size(), ps.size())));
  const double got = eval_segment::edit_score(gs, ps);
  require(std::abs(got - expected) <= 1e-12, "edit score mismatch vs recursion");
}

std::string check_segmentation_oracles() {
  // exhaustive: every pair of label sequences of length <= 4 over 3 labels
  std::vector<LabelSequence> all;
  for (int length = 1; length <= 4; ++length) {
    const int combos = static_cast<int>(std::pow(3, length));
    for (int code = 0; code < combos; ++code) {
      LabelSequence s;
      int c = code;
      for (int i = 0; i < length; ++i) {
        s.push_back(kAllGestureLabels[static_cast<std::size_t>(c % 3)]);
        c /= 3;
      }
      all.push_back(s);
    }
  }
  for (const auto& gt : all)
    for (const auto& pred : all) check_edit_pair(gt, pred);

  // random longer pairs from the full <= 8 frame space
  std::mt19937 rng(107);
  std::uniform_int_distribution<int> len(1, 8);
  std::uniform_int_distribution<int> pick(0, 2);
  auto random_seq = [&] {
    LabelSequence s;
    const int n = len(rng);
    for (int i = 0; i < n; ++i)
      s.push_back(kAllGestureLabels[static_cast<std::size_t>(pick(rng))]);
    return s;
  };
  for (int trial = 0; trial < 5000; ++trial)
    check_edit_pair(random_seq(), random_seq());

  // frame accuracy vs naive counting
  std::uniform_int_distribution<int> acc_len(1, 100);
  std::uniform_int_distribution<int> pick8(0, 7);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = acc_len(rng);
    LabelSequence gt, pred;
    for (int i = 0; i < n; ++i) {
      gt.push_back(kAllGestureLabels[static_cast<std::size_t>(pick8(rng))]);
      pred.push_back(kAllGestureLabels[static_cast<std::size_t>(pick8(rng))]);
    }
    int matches = 0;
    for (int i = 0; i < n; ++i)
      if (gt[static_cast<std::size_t>(i)] == pred[static_cast<std::size_t>(i)])
        ++matches;
    const double expected = 100.0 * matches / n;
    require(eval_segment::frame_accuracy(gt, pred) == expected,
            "frame accuracy mismatch vs naive counting");
  }

  // F1 monotonicity in k
  std::uniform_int_distribution<int> f1_len(1, 60);
  for (int trial = 0; trial < 10000; ++trial) {
    LabelSequence gt, pred;
    const int n = f1_len(rng);
    for (int i = 0; i < n; ++i) {
      gt.push_back(kAllGestureLabels[static_cast<std::size_t>(pick(rng))]);
      pred.push_back(kAllGestureLabels[static_cast<std::size_t>(pick(rng))]);
    }
    const auto gs = eval_segment::to_segments(gt);
    const auto ps = eval_segment::to_segments(pred);
    const double f10 = eval_segment::f1_at_k(gs, ps, 10);
    const double f25 = eval_segment::f1_at_k(gs, ps, 25);
    const double f50 = eval_segment::f1_at_k(gs, ps, 50);
    require(f10 >= f25 && f25 >= f50, "F1@k not monotone");
  }

  // the hand-computed half-overlap case
  eval_segment::SegmentSequence gt_case{{GestureLabel::G1, 0, 99}};
  eval_segment::SegmentSequence pred_case{{GestureLabel::G1, 0, 49}};
  require(eval_segment::f1_at_k(gt_case, pred_case, 50) == 100.0,
          "half-overlap F1@50 is not exactly 100");
  return "14641 exhaustive + 5000 random edit pairs, 10000 acc, 10000 F1";
}

// ---------------------------------------------------------------------------
// criterion 7: statistics oracle
// ---------------------------------------------------------------------------

// independent U: count (first > second) pairs, halves for ties
double oracle_u_stat(const std::vector<int>& first,
                     const std::vector<int>& second) {
  double u = 0;
  for (int a : first)
    for (int b : second) u += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
  return u;
}

std::string check_statistics_oracle() {
  long long instances = 0;
  for (int total = 2; total <= 12; ++total) {
    for (int n1 = 1; n1 < total; ++n1) {
      const int n2 = total - n1;
      // enumerate every subset of {1..total} of size n1
      std::vector<bool> mask(static_cast<std::size_t>(total), false);
      std::fill(mask.begin(), mask.begin() + n1, true);
      std::sort(mask.begin(), mask.end(), std::greater<bool>());
      std::vector<double> u_values;
      std::vector<std::vector<int>> subsets;
      do {
        std::vector<int> first, second;
        for (int r = 0; r < total; ++r)
          (mask[static_cast<std::size_t>(r)] ? first : second).push_back(r + 1);
        u_values.push_back(oracle_u_stat(first, second));
        subsets.push_back(first);
      } while (std::prev_permutation(mask.begin(), mask.end()));

      const double denom = static_cast<double>(u_values.size());
      for (std::size_t s = 0; s < subsets.size(); ++s) {
        std::vector<double> a, b;
        std::vector<bool> taken(static_cast<std::size_t>(total) + 1, false);
        for (int r : subsets[s]) {
          a.push_back(r);
          taken[static_cast<std::size_t>(r)] = true;
        }
        for (int r = 1; r <= total; ++r)
          if (!taken[static_cast<std::size_t>(r)]) b.push_back(r);

        const double dev_obs = std::abs(2.0 * u_values[s] - n1 * n2);
        long long tail = 0;
        for (double u : u_values)
          if (std::abs(2.0 * u - n1 * n2) >= dev_obs) ++tail;
        const double expected = static_cast<double>(tail) / denom;

        const auto r = stats::rank_sum_test({"a", a}, {"b", b});
        require(r.method == stats::TestMethod::Exact, "expected exact method");
        require(r.p_value == expected,
                "exact p mismatch at n1=" + std::to_string(n1) +
                    " n2=" + std::to_string(n2));
        ++instances;
      }
    }
  }

  // the hand case
  const auto hand = stats::rank_sum_test({"a", {1, 2, 3}}, {"b", {4, 5, 6}});
  require(std::abs(hand.p_value - 0.1) <= 1e-12, "[1,2,3] vs [4,5,6] p != 0.1");
  require(hand.u_statistic == 0.0, "[1,2,3] vs [4,5,6] U != 0");

  // exact scale invariance
  std::mt19937 rng(108);
  std::uniform_real_distribution<double> v(0.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a, b, seen;
    auto fresh = [&] {
      double x;
      do {
        x = v(rng);
      } while (std::find(seen.begin(), seen.end(), x) != seen.end());
      seen.push_back(x);
      return x;
    };
    for (int i = 0; i < 5; ++i) a.push_back(fresh());
    for (int i = 0; i < 6; ++i) b.push_back(fresh());
    const auto before = stats::rank_sum_test({"a", a}, {"b", b});
    for (double& x : a) x *= 7.5;
    for (double& x : b) x *= 7.5;
    const auto after = stats::rank_sum_test({"a", a}, {"b", b});
    require(before.u_statistic == after.u_statistic, "U changed under scaling");
    require(before.p_value == after.p_value, "p changed under scaling");
  }

  // exact vs normal approximation over the whole 4..8 x 4..8 domain:
  // for tie-free data both p-values depend only on (n1, n2, U), so sweeping
  // every U value covers every possible sample
  double worst_gap = 0;
  int worst_n1 = 0, worst_n2 = 0, worst_u = 0;
  for (int n1 = 4; n1 <= 8; ++n1) {
    for (int n2 = 4; n2 <= 8; ++n2) {
      for (int u = 0; u <= n1 * n2; ++u) {
        const double exact = stats::detail::exact_two_sided_p(n1, n2, u);
        const double approx =
            stats::detail::normal_two_sided_p(n1, n2, u, 0.0);
        if (std::abs(exact - approx) > worst_gap) {
          worst_gap = std::abs(exact - approx);
          worst_n1 = n1;
          worst_n2 = n2;
          worst_u = u;
        }
      }
    }
  }
  std::ostringstream os;
  os << instances << " exact instances == brute force, hand case and scale "
     << "invariance hold; exhaustive exact-vs-approx sweep: worst |dp| = "
     << worst_gap << " at n1=" << worst_n1 << " n2=" << worst_n2
     << " U=" << worst_u;
  require(worst_gap <= 0.03, os.str() +
                                 " — exceeds the 0.03 band (property of the "
                                 "two methods themselves; see ledger)");
  return os.str();
}

// ---------------------------------------------------------------------------
// criteria 8 and 9: end-to-end synthetic reproduction + determinism
// ---------------------------------------------------------------------------

struct EndToEnd {
  std::string first_bytes;
  std::string detail;
};

EndToEnd run_end_to_end() {
  TempDir tmp("acceptance_e2e");
  synthetic::CohortConfig cfg;
  cfg.root = tmp.path / "data";
  cfg.frames = 90;
  const auto paths = synthetic::generate_cohort(cfg);

  pipeline::PathOptions opts;
  opts.manifest_path = paths.manifest;
  opts.intrinsics_path = paths.intrinsics;

  const auto t0 = Clock::now();
  const auto output = pipeline::run_path3d(opts);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();

  double expert_sum = 0, resident_sum = 0;
  int experts = 0, residents = 0;
  for (const auto& p : output.report["participants"]) {
    const double len = p["hands"]["combined"]["length_3d"].get<double>();
    if (p["group"] == "Expert") {
      expert_sum += len;
      ++experts;
    } else {
      resident_sum += len;
      ++residents;
    }
  }
  require(experts == 4 && residents == 8, "cohort has the wrong shape");
  const double expert_mean = expert_sum / experts;
  const double resident_mean = resident_sum / residents;
  require(expert_mean < resident_mean,
          "expert mean path is not shorter than resident mean");

  const auto& row = output.report["group_stats"][0];
  require(row["method"] == "Exact", "end-to-end test is not exact");
  const double p = row["p"].get<double>();
  require(p < 0.05, "p = " + std::to_string(p) + " is not below 0.05");
  require(secs < 60.0, "pipeline took " + std::to_string(secs) + " s");

  // second run over the same inputs, written to disk like the CLI does
  const auto again = pipeline::run_path3d(opts);
  const std::string bytes_a = report::canonical_dump(output.report);
  const std::string bytes_b = report::canonical_dump(again.report);
  std::ofstream(tmp.path / "a.json", std::ios::binary) << bytes_a;
  std::ofstream(tmp.path / "b.json", std::ios::binary) << bytes_b;
  std::ifstream fa(tmp.path / "a.json", std::ios::binary);
  std::ifstream fb(tmp.path / "b.json", std::ios::binary);
  const std::string disk_a((std::istreambuf_iterator<char>(fa)), {});
  const std::string disk_b((std::istreambuf_iterator<char>(fb)), {});

  EndToEnd result;
  result.first_bytes = disk_a == disk_b ? "identical" : "DIFFERENT";
  std::ostringstream os;
  os << "expert mean " << expert_mean << " m < resident mean " << resident_mean
     << " m, exact p = " << p;
  result.detail = os.str();
  require(disk_a == disk_b, "reports differ between runs");
  return result;
}

// ---------------------------------------------------------------------------
// criterion 10: viz contract
// ---------------------------------------------------------------------------

std::string check_viz_contract() {
  const auto t0 = Clock::now();
  const viz::GrayscaleMapping mapping{0.5, 2.0, 0.001};
  require(viz::gray_value(0, mapping) == 0, "invalid depth must map to 0");
  require(viz::gray_value(500, mapping) == 255, "near must map to 255");
  require(viz::gray_value(2000, mapping) == 0, "far must map to 0");
  int prev = 255;
  for (int raw = 1; raw <= 65535; ++raw) {
    const int g = viz::gray_value(static_cast<std::uint16_t>(raw), mapping);
    require(g >= 0 && g <= 255, "gray outside [0,255]");
    require(g <= prev, "gray not monotone at raw " + std::to_string(raw));
    prev = g;
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  require(secs < 1.0, "sweep took " + std::to_string(secs) + " s");
  return "full 16-bit sweep monotone with exact endpoints";
}

}  // namespace

int main() {
  Harness h;
  h.criterion(1, "geometry-round-trip", check_geometry_round_trip);
  h.criterion(2, "path-length-oracle", check_path_length_oracle);
  h.criterion(3, "planar-dominance", check_planar_dominance);
  h.criterion(4, "gesture-partition", check_gesture_partition);
  h.criterion(5, "detection-eval-oracle", check_detection_oracle);
  h.criterion(6, "segmentation-oracles", check_segmentation_oracles);
  h.criterion(7, "statistics-oracle", check_statistics_oracle);

  // criteria 8 and 9 share one cohort run
  EndToEnd e2e;
  bool e2e_ok = false;
  h.criterion(8, "end-to-end-synthetic", [&] {
    e2e = run_end_to_end();
    e2e_ok = true;
    return e2e.detail;
  });
  h.criterion(9, "report-determinism", [&]() -> std::string {
    require(e2e_ok, "end-to-end run failed, determinism not assessable");
    require(e2e.first_bytes == "identical", "report bytes differ");
    return "two runs byte-identical";
  });

  h.criterion(10, "viz-contract", check_viz_contract);

  if (h.failures == 0) {
    std::printf("acceptance: all 10 criteria passed\n");
  } else {
    std::printf("acceptance: %d criteria FAILED\n", h.failures);
  }
  return h.failures;
}
