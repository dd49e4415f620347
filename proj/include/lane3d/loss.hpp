#pragma once

#include "lane3d/anchor.hpp"

namespace lane3d {

/// Additive breakdown of the anchor loss; total is the exact sum of the
/// four terms.
struct LossBreakdown {
  double existence_term = 0.0;
  double offset_term = 0.0;
  double height_term = 0.0;
  double visibility_term = 0.0;
  double total = 0.0;
};

/// Evaluates the anchor loss of a prediction against binary ground truth:
/// cross-entropy on anchor existence plus, per active ground-truth anchor,
/// L1 on x offsets and heights masked by ground-truth visibility and L1 on
/// the visibility vectors. Plain sums, no term weights. Log arguments are
/// floored at 1e-7 so saturated probabilities stay finite and a perfect
/// prediction scores exactly zero. Throws ShapeMismatch when tensor shapes
/// disagree with the config.
LossBreakdown loss(const AnchorTensor& pred, const AnchorTensor& gt, const AnchorConfig& cfg);

}  // namespace lane3d
