#include "lane3d/loss.hpp"

#include <cmath>

namespace lane3d {

namespace {

constexpr double kLogFloor = 1e-7;

double safe_neg_log(double p) { return -std::log(p < kLogFloor ? kLogFloor : p); }

void check_block(const AnchorBlock& b, int n, int k, const char* which) {
  if (b.x_offsets.rows() != n || b.x_offsets.cols() != k || b.heights.rows() != n ||
      b.heights.cols() != k || b.visibility.rows() != n || b.visibility.cols() != k ||
      b.prob.size() != n) {
    throw ShapeMismatch(std::string(which) + " tensor shape does not match the anchor config");
  }
}

}  // namespace

LossBreakdown loss(const AnchorTensor& pred, const AnchorTensor& gt, const AnchorConfig& cfg) {
  const int n = cfg.num_anchors();
  const int k = cfg.num_y();
  for (LaneCategory cat : {LaneCategory::Laneline, LaneCategory::Centerline}) {
    check_block(pred.block(cat), n, k, "pred");
    check_block(gt.block(cat), n, k, "gt");
  }

  LossBreakdown out;
  for (LaneCategory cat : {LaneCategory::Laneline, LaneCategory::Centerline}) {
    const AnchorBlock& p = pred.block(cat);
    const AnchorBlock& g = gt.block(cat);
    for (int i = 0; i < n; ++i) {
      const double p_hat = g.prob(i);  // ground truth, binary
      out.existence_term += p_hat * safe_neg_log(p.prob(i)) + (1.0 - p_hat) * safe_neg_log(1.0 - p.prob(i));
      if (p_hat == 0.0) continue;
      double off = 0.0, hgt = 0.0, vis = 0.0;
      for (int j = 0; j < k; ++j) {
        const double v_hat = g.visibility(i, j);
        off += v_hat * std::abs(p.x_offsets(i, j) - g.x_offsets(i, j));
        hgt += v_hat * std::abs(p.heights(i, j) - g.heights(i, j));
        vis += std::abs(p.visibility(i, j) - v_hat);
      }
      out.offset_term += p_hat * off;
      out.height_term += p_hat * hgt;
      out.visibility_term += p_hat * vis;
    }
  }
  out.total = out.existence_term + out.offset_term + out.height_term + out.visibility_term;
  return out;
}

}  // namespace lane3d
