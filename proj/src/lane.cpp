#include "lane3d/lane.hpp"

#include <cmath>

#include "lane3d/errors.hpp"

namespace lane3d {

const char* to_string(LaneCategory c) {
  return c == LaneCategory::Laneline ? "laneline" : "centerline";
}

LaneCategory lane_category_from_string(const std::string& s) {
  if (s == "laneline") return LaneCategory::Laneline;
  if (s == "centerline") return LaneCategory::Centerline;
  throw SchemaError("category", "unknown lane category '" + s + "'");
}

void validate_lane(const Lane3D& lane) {
  if (lane.points.size() < 2) {
    throw SchemaError("points", "a lane needs at least two points");
  }
  for (const EgoPoint& p : lane.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw SchemaError("points", "lane point is not finite");
    }
  }
  for (std::size_t i = 1; i < lane.points.size(); ++i) {
    if (!(lane.points[i].y > lane.points[i - 1].y)) {
      throw SchemaError("points", "lane y values must be strictly increasing");
    }
  }
  if (lane.visibility.size() != lane.points.size()) {
    throw SchemaError("visibility", "visibility length does not match points length");
  }
  for (std::uint8_t v : lane.visibility) {
    if (v > 1) {
      throw SchemaError("visibility", "visibility flags must be 0 or 1");
    }
  }
  if (!(lane.prob >= 0.0 && lane.prob <= 1.0)) {
    throw SchemaError("prob", "existence probability must be in [0, 1]");
  }
}

}  // namespace lane3d
