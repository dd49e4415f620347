#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lane3d/matching.hpp"

namespace lane3d {

/// One frame of the evaluation dataset: predicted and ground-truth lanes of
/// both categories.
struct EvalFrame {
  std::vector<Lane3D> preds;
  std::vector<Lane3D> gts;
};

struct PRPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
};

/// Per-category evaluation result. Error columns are mean absolute per-axis
/// deviations over positions covered by both lanes of a matched pair at the
/// best-F threshold, split at near_far_split.
struct CategoryReport {
  double ap = 0.0;
  double f_max = 0.0;
  double best_threshold = 0.0;
  std::vector<PRPoint> curve;
  double x_err_near = 0.0;
  double x_err_far = 0.0;
  double z_err_near = 0.0;
  double z_err_far = 0.0;
  long gt_count = 0;        // ground-truth lanes over the dataset
  long pred_count = 0;      // predictions kept at the best-F threshold
  long matched_preds = 0;   // at the best-F threshold
  long matched_gts = 0;     // at the best-F threshold
};

/// Lanelines and centerlines are evaluated separately.
struct EvalReport {
  CategoryReport laneline;
  CategoryReport centerline;

  const CategoryReport& category(LaneCategory c) const {
    return c == LaneCategory::Laneline ? laneline : centerline;
  }
};

/// Default confidence sweep 0.05, 0.10, ..., 0.95.
std::vector<double> default_thresholds();

/// Precision/recall for one category at confidence threshold tau:
/// predictions with prob < tau are dropped, frames are matched
/// independently, and counts are pooled over the dataset. No predictions
/// yields precision 1, no ground truth yields recall 1.
std::pair<double, double> pr_at_threshold(const std::vector<EvalFrame>& frames, LaneCategory category,
                                          double tau, const MatchConfig& cfg);

/// Full sweep: PR curve per threshold, maximum F-score, AP as the area under
/// the monotone precision envelope integrated over recall (extended to
/// recall 0), and near/far error statistics at the best-F threshold. Frames
/// are reduced in index order so results are schedule-independent. Throws
/// EmptyDataset on an empty frame list or threshold list.
EvalReport evaluate(const std::vector<EvalFrame>& frames, const MatchConfig& cfg,
                    const std::vector<double>& thresholds = default_thresholds());

}  // namespace lane3d
