#include "lane3d/anchor.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "interp.hpp"

namespace lane3d {

namespace {

// A lane projected into the virtual top-view, column-wise.
struct TopViewLane {
  std::vector<double> ys;
  std::vector<double> xs;
  std::vector<double> zs;
  std::vector<std::uint8_t> vis;
};

TopViewLane project_topview(const Lane3D& lane, double cam_height) {
  TopViewLane tv;
  tv.ys.reserve(lane.points.size());
  tv.xs.reserve(lane.points.size());
  tv.zs.reserve(lane.points.size());
  for (const EgoPoint& p : lane.points) {
    const TopViewPoint t = ego_to_topview(p, cam_height);
    tv.ys.push_back(t.y);
    tv.xs.push_back(t.x);
    tv.zs.push_back(p.z);
  }
  tv.vis = lane.visibility;
  return tv;
}

int nearest_anchor(const AnchorConfig& cfg, double x) {
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.num_anchors(); ++i) {
    const double d = std::abs(x - cfg.anchor_x_positions[i]);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

AnchorConfig AnchorConfig::defaults() {
  AnchorConfig cfg;
  cfg.anchor_x_positions.resize(26);
  for (int i = 0; i < 26; ++i) {
    cfg.anchor_x_positions[i] = -10.0 + 0.8 * i;
  }
  cfg.y_positions = {3.0, 5.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0, 65.0, 80.0, 100.0};
  cfg.y_ref = 5.0;
  return cfg;
}

AnchorTensor AnchorTensor::zeros(const AnchorConfig& cfg) {
  const int n = cfg.num_anchors();
  const int k = cfg.num_y();
  AnchorTensor t;
  for (AnchorBlock* b : {&t.laneline, &t.centerline}) {
    b->x_offsets = Eigen::MatrixXd::Zero(n, k);
    b->heights = Eigen::MatrixXd::Zero(n, k);
    b->visibility = Eigen::MatrixXd::Zero(n, k);
    b->prob = Eigen::VectorXd::Zero(n);
  }
  return t;
}

int associate_anchor(const Lane3D& lane, const AnchorConfig& cfg, double cam_height) {
  const TopViewLane tv = project_topview(lane, cam_height);
  if (cfg.y_ref < tv.ys.front() || cfg.y_ref > tv.ys.back()) {
    throw LaneDoesNotCoverYref("lane top-view projection does not cover y_ref");
  }
  return nearest_anchor(cfg, detail::interp_clamped(tv.ys, tv.xs, cfg.y_ref));
}

EncodeResult encode(const std::vector<Lane3D>& lanes, const AnchorConfig& cfg, double cam_height) {
  EncodeResult result;
  result.tensor = AnchorTensor::zeros(cfg);

  // Winner per (category, anchor). Lanes past y_ref use the nearest-endpoint
  // value of x(y_ref), so every lane gets an association.
  struct Claim {
    std::size_t lane;
    double dist;
    TopViewLane tv;
  };
  std::vector<std::vector<Claim>> winners(2, std::vector<Claim>(cfg.num_anchors(), Claim{0, -1.0, {}}));

  for (std::size_t li = 0; li < lanes.size(); ++li) {
    const Lane3D& lane = lanes[li];
    TopViewLane tv = project_topview(lane, cam_height);
    const double x_ref = detail::interp_clamped(tv.ys, tv.xs, cfg.y_ref);
    const int anchor = nearest_anchor(cfg, x_ref);
    const double dist = std::abs(x_ref - cfg.anchor_x_positions[anchor]);

    Claim& cur = winners[static_cast<int>(lane.category)][anchor];
    if (cur.dist < 0.0) {
      cur = Claim{li, dist, std::move(tv)};
    } else if (dist < cur.dist) {
      result.collisions.push_back({lane.category, anchor, li, cur.lane});
      cur = Claim{li, dist, std::move(tv)};
    } else {
      result.collisions.push_back({lane.category, anchor, cur.lane, li});
    }
  }

  for (LaneCategory cat : {LaneCategory::Laneline, LaneCategory::Centerline}) {
    AnchorBlock& block = result.tensor.block(cat);
    for (int a = 0; a < cfg.num_anchors(); ++a) {
      const Claim& claim = winners[static_cast<int>(cat)][a];
      if (claim.dist < 0.0) continue;
      const TopViewLane& tv = claim.tv;
      const auto segments = detail::visible_intervals(tv.ys, tv.vis);
      for (int j = 0; j < cfg.num_y(); ++j) {
        const double y = cfg.y_positions[j];
        block.x_offsets(a, j) = detail::interp_clamped(tv.ys, tv.xs, y) - cfg.anchor_x_positions[a];
        block.heights(a, j) = detail::interp_clamped(tv.ys, tv.zs, y);
        const bool vis = detail::in_intervals(segments, y) && cfg.top_view_grid.contains_y(y);
        block.visibility(a, j) = vis ? 1.0 : 0.0;
      }
      block.prob(a) = 1.0;
    }
  }
  return result;
}

std::vector<Lane3D> decode(const AnchorTensor& t, const AnchorConfig& cfg, double cam_height,
                           double prob_threshold, double vis_threshold) {
  for (LaneCategory cat : {LaneCategory::Laneline, LaneCategory::Centerline}) {
    const AnchorBlock& b = t.block(cat);
    if (b.x_offsets.rows() != cfg.num_anchors() || b.x_offsets.cols() != cfg.num_y() ||
        b.prob.size() != cfg.num_anchors()) {
      throw ShapeMismatch("tensor shape does not match the anchor config");
    }
  }
  std::vector<Lane3D> lanes;
  for (LaneCategory cat : {LaneCategory::Laneline, LaneCategory::Centerline}) {
    const AnchorBlock& block = t.block(cat);
    for (int a = 0; a < cfg.num_anchors(); ++a) {
      if (block.prob(a) < prob_threshold) continue;
      Lane3D lane;
      lane.category = cat;
      lane.prob = block.prob(a);
      for (int j = 0; j < cfg.num_y(); ++j) {
        if (block.visibility(a, j) < vis_threshold) continue;
        const double z = block.heights(a, j);
        if (!(z < cam_height - kHeightEps)) continue;  // not realizable on a camera ray
        const TopViewPoint tv{cfg.anchor_x_positions[a] + block.x_offsets(a, j), cfg.y_positions[j]};
        lane.points.push_back(topview_to_ego(tv, z, cam_height));
        lane.visibility.push_back(1);
      }
      if (lane.points.size() >= 2) {
        lanes.push_back(std::move(lane));
      }
    }
  }
  return lanes;
}

}  // namespace lane3d
