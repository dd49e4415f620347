#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "lane3d/lane.hpp"

namespace lane3d {

/// Lane resampled at the dense evaluation y positions. covered marks the
/// positions inside the lane's visible span; xs/zs are meaningful only
/// where covered.
struct DenseLane {
  std::vector<double> xs;
  std::vector<double> zs;
  std::vector<std::uint8_t> covered;
  double prob = 1.0;
};

struct MatchConfig {
  std::vector<double> dense_y_positions;  // default 0, 2, ..., 100
  double d_max = 1.5;
  double match_fraction = 0.75;
  double near_far_split = 40.0;
  double range_end = 100.0;
  // Cost contribution of a position covered by exactly one lane. The text
  // defining the cost charges d_max literally despite summing squared
  // distances elsewhere; set true to charge d_max^2 instead.
  bool edited_cost_squared = false;

  static MatchConfig defaults();
};

/// Lane-to-lane cost and the per-position point-wise distances. pointwise[i]
/// is the euclidean (x, z) distance where both lanes cover position i, d_max
/// where exactly one does, and 0 where neither does.
struct LaneCost {
  double cost = 0.0;
  std::vector<double> pointwise;
};

struct MatchedPair {
  int pred = -1;
  int gt = -1;
  double cost = 0.0;
};

struct MatchReport {
  std::vector<MatchedPair> assignment;              // partial matching, sorted by pred index
  std::vector<std::uint8_t> pred_matched;           // per pred lane
  std::vector<std::uint8_t> gt_matched;             // per gt lane
  std::vector<std::vector<double>> pointwise;       // aligned with assignment
};

/// Linear resampling of (x, z) at cfg.dense_y_positions over the lane's
/// visible coverage.
DenseLane densify(const Lane3D& lane, const MatchConfig& cfg);

/// cost = sqrt(sum_i d_i) with d_i the squared point distance where both
/// cover, 0 where neither, and d_max (edited point) otherwise. Throws
/// LengthMismatch on different grid sizes.
LaneCost lane_cost(const DenseLane& a, const DenseLane& b, const MatchConfig& cfg);

/// Minimum-cost bipartite assignment of cardinality min(rows, cols) via
/// successive shortest paths with potentials (unit capacities source->row,
/// row->col, col->sink). Deterministic: scans run in index order, ties keep
/// the first candidate. Costs must be finite and nonnegative. Returns
/// (row, col) pairs sorted by row.
std::vector<std::pair<int, int>> min_cost_assign(const Eigen::MatrixXd& cost);

/// Full per-frame matching for one lane category: densify, build the cost
/// matrix, assign globally, then flag each assigned lane as matched when at
/// least match_fraction of its own covered positions lie strictly within
/// d_max point-wise.
MatchReport match_frame(const std::vector<Lane3D>& preds, const std::vector<Lane3D>& gts,
                        const MatchConfig& cfg);

/// Same as match_frame but on pre-densified lanes (the metrics sweep reuses
/// densified lanes across thresholds).
MatchReport match_dense(const std::vector<DenseLane>& preds, const std::vector<DenseLane>& gts,
                        const MatchConfig& cfg);

}  // namespace lane3d
