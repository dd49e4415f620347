#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lane3d/geometry.hpp"

namespace lane3d {

enum class LaneCategory : std::uint8_t { Laneline = 0, Centerline = 1 };

const char* to_string(LaneCategory c);

/// Throws SchemaError for unknown names.
LaneCategory lane_category_from_string(const std::string& s);

/// 3D lane polyline in the ego frame. Points are ordered by strictly
/// increasing y, visibility carries one 0/1 flag per point, and prob is the
/// existence probability (1.0 for ground truth).
struct Lane3D {
  LaneCategory category = LaneCategory::Laneline;
  std::vector<EgoPoint> points;
  std::vector<std::uint8_t> visibility;
  double prob = 1.0;
};

/// Enforces the polyline invariants (>= 2 points, strictly increasing y,
/// matching visibility length, prob in [0, 1]); throws SchemaError naming
/// the offending field.
void validate_lane(const Lane3D& lane);

}  // namespace lane3d
