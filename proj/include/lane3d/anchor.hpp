#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "lane3d/lane.hpp"

namespace lane3d {

/// Anchor layout: N vertical reference lines at anchor_x_positions (meters,
/// strictly increasing) sampled at K fixed top-view y_positions. y_ref is
/// the forward distance used to associate a lane with its nearest anchor.
struct AnchorConfig {
  std::vector<double> anchor_x_positions;
  std::vector<double> y_positions;
  double y_ref = 5.0;
  TopViewGrid top_view_grid = kDefaultTopViewGrid;

  int num_anchors() const { return static_cast<int>(anchor_x_positions.size()); }
  int num_y() const { return static_cast<int>(y_positions.size()); }

  /// 26 anchors equally spaced over [-10, 10] (0.8 m apart, one per 8-pixel
  /// column of the 208-wide top view), y positions
  /// {3, 5, 10, 15, 20, 30, 40, 50, 65, 80, 100}, y_ref = 5.
  static AnchorConfig defaults();
};

/// Per-category anchor attributes, N rows (anchors) by K columns (y positions).
/// x_offsets are top-view x relative to the anchor line, heights are z, and
/// visibility/prob live in [0, 1].
struct AnchorBlock {
  Eigen::MatrixXd x_offsets;
  Eigen::MatrixXd heights;
  Eigen::MatrixXd visibility;
  Eigen::VectorXd prob;
};

struct AnchorTensor {
  AnchorBlock laneline;
  AnchorBlock centerline;

  AnchorBlock& block(LaneCategory c) { return c == LaneCategory::Laneline ? laneline : centerline; }
  const AnchorBlock& block(LaneCategory c) const {
    return c == LaneCategory::Laneline ? laneline : centerline;
  }

  static AnchorTensor zeros(const AnchorConfig& cfg);
};

/// Two same-category lanes claimed one anchor; the nearer lane (smaller
/// |x(y_ref) - X_A|) was kept and the other dropped from the tensor.
struct AnchorCollision {
  LaneCategory category = LaneCategory::Laneline;
  int anchor = 0;
  std::size_t kept_lane = 0;
  std::size_t dropped_lane = 0;
};

struct EncodeResult {
  AnchorTensor tensor;
  std::vector<AnchorCollision> collisions;
};

/// Index of the anchor nearest to the lane's top-view x at y_ref (linearly
/// interpolated along the projected polyline; ties go to the smaller index).
/// Throws LaneDoesNotCoverYref when the projection does not span y_ref.
int associate_anchor(const Lane3D& lane, const AnchorConfig& cfg, double cam_height);

/// Encodes ground-truth lanes into the anchor representation. Lane points are
/// projected to the top-view, each lane is associated with its nearest anchor
/// (x at y_ref, extrapolated flat when the lane starts past y_ref), and
/// offsets/heights are interpolated at the y positions with nearest-endpoint
/// extrapolation. Visibility is 1 exactly where a y position falls inside a
/// visible segment of the projected lane and inside the top-view grid's
/// y range. Anchor collisions are resolved nearest-wins and reported.
EncodeResult encode(const std::vector<Lane3D>& lanes, const AnchorConfig& cfg, double cam_height);

/// Decodes anchors with prob >= prob_threshold back to 3D polylines through
/// topview_to_ego, keeping points with visibility >= vis_threshold. Anchors
/// yielding fewer than two points are dropped; decoded lanes carry the
/// anchor's prob.
std::vector<Lane3D> decode(const AnchorTensor& t, const AnchorConfig& cfg, double cam_height,
                           double prob_threshold = 0.5, double vis_threshold = 0.5);

}  // namespace lane3d
