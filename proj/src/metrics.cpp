#include "lane3d/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace lane3d {

namespace {

struct DenseFrame {
  std::vector<DenseLane> preds;
  std::vector<DenseLane> gts;
};

std::vector<DenseFrame> densify_category(const std::vector<EvalFrame>& frames, LaneCategory category,
                                         const MatchConfig& cfg) {
  std::vector<DenseFrame> out;
  out.reserve(frames.size());
  for (const EvalFrame& frame : frames) {
    DenseFrame df;
    for (const Lane3D& lane : frame.preds) {
      if (lane.category == category) df.preds.push_back(densify(lane, cfg));
    }
    for (const Lane3D& lane : frame.gts) {
      if (lane.category == category) df.gts.push_back(densify(lane, cfg));
    }
    out.push_back(std::move(df));
  }
  return out;
}

std::vector<DenseLane> keep_above(const std::vector<DenseLane>& lanes, double tau) {
  std::vector<DenseLane> out;
  for (const DenseLane& lane : lanes) {
    if (lane.prob >= tau) out.push_back(lane);
  }
  return out;
}

struct SweepPoint {
  long kept_preds = 0;
  long matched_preds = 0;
  long total_gts = 0;
  long matched_gts = 0;

  double precision() const {
    return kept_preds == 0 ? 1.0 : static_cast<double>(matched_preds) / static_cast<double>(kept_preds);
  }
  double recall() const {
    return total_gts == 0 ? 1.0 : static_cast<double>(matched_gts) / static_cast<double>(total_gts);
  }
};

SweepPoint sweep_at(const std::vector<DenseFrame>& frames, double tau, const MatchConfig& cfg) {
  SweepPoint pt;
  for (const DenseFrame& frame : frames) {
    const std::vector<DenseLane> kept = keep_above(frame.preds, tau);
    const MatchReport report = match_dense(kept, frame.gts, cfg);
    pt.kept_preds += static_cast<long>(kept.size());
    pt.total_gts += static_cast<long>(frame.gts.size());
    for (std::uint8_t f : report.pred_matched) pt.matched_preds += f;
    for (std::uint8_t f : report.gt_matched) pt.matched_gts += f;
  }
  return pt;
}

double f_score(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

// Area under the monotone precision envelope integrated over recall, with
// the leftmost point extended to recall 0.
double average_precision(const std::vector<PRPoint>& curve) {
  std::vector<std::pair<double, double>> pts;  // (recall, precision)
  pts.reserve(curve.size());
  for (const PRPoint& p : curve) pts.emplace_back(p.recall, p.precision);
  std::stable_sort(pts.begin(), pts.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  double env = 0.0;
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    env = std::max(env, it->second);
    it->second = env;
  }
  double ap = 0.0;
  double prev_r = 0.0;
  for (const auto& [r, p] : pts) {
    ap += (r - prev_r) * p;
    prev_r = r;
  }
  return ap;
}

CategoryReport evaluate_category(const std::vector<DenseFrame>& frames, const MatchConfig& cfg,
                                 const std::vector<double>& thresholds) {
  CategoryReport report;
  double best_f = -1.0;
  SweepPoint best_point;
  for (double tau : thresholds) {
    const SweepPoint pt = sweep_at(frames, tau, cfg);
    const double p = pt.precision();
    const double r = pt.recall();
    const double f = f_score(p, r);
    report.curve.push_back({tau, p, r, f});
    if (f > best_f) {
      best_f = f;
      report.best_threshold = tau;
      best_point = pt;
    }
  }
  report.f_max = best_f;
  report.ap = average_precision(report.curve);
  report.pred_count = best_point.kept_preds;
  report.matched_preds = best_point.matched_preds;
  report.matched_gts = best_point.matched_gts;
  report.gt_count = best_point.total_gts;

  // Error statistics over matched pairs at the best-F threshold, restricted
  // to positions covered by both lanes (never d_max-padded ones).
  double sum_x_near = 0.0, sum_x_far = 0.0, sum_z_near = 0.0, sum_z_far = 0.0;
  long cnt_near = 0, cnt_far = 0;
  for (const DenseFrame& frame : frames) {
    const std::vector<DenseLane> kept = keep_above(frame.preds, report.best_threshold);
    const MatchReport mr = match_dense(kept, frame.gts, cfg);
    for (const MatchedPair& pair : mr.assignment) {
      if (!mr.pred_matched[pair.pred] || !mr.gt_matched[pair.gt]) continue;
      const DenseLane& pl = kept[pair.pred];
      const DenseLane& gl = frame.gts[pair.gt];
      for (std::size_t i = 0; i < pl.covered.size(); ++i) {
        if (!pl.covered[i] || !gl.covered[i]) continue;
        const double y = cfg.dense_y_positions[i];
        if (y > cfg.range_end) continue;
        const double dx = std::abs(pl.xs[i] - gl.xs[i]);
        const double dz = std::abs(pl.zs[i] - gl.zs[i]);
        if (y < cfg.near_far_split) {
          sum_x_near += dx;
          sum_z_near += dz;
          ++cnt_near;
        } else {
          sum_x_far += dx;
          sum_z_far += dz;
          ++cnt_far;
        }
      }
    }
  }
  if (cnt_near > 0) {
    report.x_err_near = sum_x_near / cnt_near;
    report.z_err_near = sum_z_near / cnt_near;
  }
  if (cnt_far > 0) {
    report.x_err_far = sum_x_far / cnt_far;
    report.z_err_far = sum_z_far / cnt_far;
  }
  return report;
}

}  // namespace

std::vector<double> default_thresholds() {
  std::vector<double> out;
  for (int i = 1; i <= 19; ++i) {
    out.push_back(0.05 * i);
  }
  return out;
}

std::pair<double, double> pr_at_threshold(const std::vector<EvalFrame>& frames, LaneCategory category,
                                          double tau, const MatchConfig& cfg) {
  const auto dense = densify_category(frames, category, cfg);
  const SweepPoint pt = sweep_at(dense, tau, cfg);
  return {pt.precision(), pt.recall()};
}

EvalReport evaluate(const std::vector<EvalFrame>& frames, const MatchConfig& cfg,
                    const std::vector<double>& thresholds) {
  if (frames.empty()) {
    throw EmptyDataset("no frames to evaluate");
  }
  if (thresholds.empty()) {
    throw EmptyDataset("no confidence thresholds to sweep");
  }
  EvalReport report;
  report.laneline =
      evaluate_category(densify_category(frames, LaneCategory::Laneline, cfg), cfg, thresholds);
  report.centerline =
      evaluate_category(densify_category(frames, LaneCategory::Centerline, cfg), cfg, thresholds);
  return report;
}

}  // namespace lane3d
