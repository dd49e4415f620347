#include "lane3d/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lane3d/rng.hpp"

namespace lane3d {

namespace {

constexpr double kNearClip = 0.05;  // camera-frame near plane (m)

struct Triangle {
  Eigen::Vector3d a, b, c;
  SemanticClass cls;
};

// Clips a triangle against the camera-frame near plane; emits 0..2 triangles.
template <typename Emit>
void clip_near(const Triangle& tri, const Eigen::Matrix3d& r, const Eigen::Vector3d& t, Emit&& emit) {
  const Eigen::Vector3d verts[3] = {tri.a, tri.b, tri.c};
  double depth[3];
  for (int i = 0; i < 3; ++i) depth[i] = (r * verts[i] + t).z();

  std::vector<Eigen::Vector3d> poly;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const bool in_i = depth[i] >= kNearClip;
    const bool in_j = depth[j] >= kNearClip;
    if (in_i) poly.push_back(verts[i]);
    if (in_i != in_j) {
      const double w = (kNearClip - depth[i]) / (depth[j] - depth[i]);
      poly.push_back(verts[i] + w * (verts[j] - verts[i]));
    }
  }
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    emit(Triangle{poly[0], poly[i], poly[i + 1], tri.cls});
  }
}

class SceneRasterizer {
 public:
  SceneRasterizer(const CameraModel& cam, Raster<float>& depth, Raster<std::uint8_t>& sem)
      : cam_(cam), depth_(depth), sem_(sem) {
    std::tie(r_, t_) = rotation_translation(cam);
    fx_ = cam.intrinsics(0, 0);
    fy_ = cam.intrinsics(1, 1);
    cx_ = cam.intrinsics(0, 2);
    cy_ = cam.intrinsics(1, 2);
    origin_ = Eigen::Vector3d(0.0, 0.0, cam.height_m);  // camera center in ego frame
  }

  void draw(const Triangle& tri) {
    clip_near(tri, r_, t_, [this](const Triangle& clipped) { draw_clipped(clipped); });
  }

 private:
  void draw_clipped(const Triangle& tri) {
    Eigen::Vector2d s[3];
    const Eigen::Vector3d verts[3] = {tri.a, tri.b, tri.c};
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector3d pc = r_ * verts[i] + t_;
      s[i] = {fx_ * pc.x() / pc.z() + cx_, fy_ * pc.y() / pc.z() + cy_};
    }
    const double area =
        (s[1] - s[0]).x() * (s[2] - s[0]).y() - (s[1] - s[0]).y() * (s[2] - s[0]).x();
    if (std::abs(area) < 1e-12) return;

    const double min_u = std::min({s[0].x(), s[1].x(), s[2].x()});
    const double max_u = std::max({s[0].x(), s[1].x(), s[2].x()});
    const double min_v = std::min({s[0].y(), s[1].y(), s[2].y()});
    const double max_v = std::max({s[0].y(), s[1].y(), s[2].y()});
    const int u0 = std::max(0, static_cast<int>(std::ceil(min_u)));
    const int u1 = std::min(cam_.image_width - 1, static_cast<int>(std::floor(max_u)));
    const int v0 = std::max(0, static_cast<int>(std::ceil(min_v)));
    const int v1 = std::min(cam_.image_height - 1, static_cast<int>(std::floor(max_v)));
    if (u0 > u1 || v0 > v1) return;

    const Eigen::Vector3d normal = (tri.b - tri.a).cross(tri.c - tri.a);
    const double plane_d = normal.dot(tri.a - origin_);

    // Coverage is evaluated at integer pixel coordinates, matching the
    // nearest-pixel sampling used everywhere else.
    for (int v = v0; v <= v1; ++v) {
      for (int u = u0; u <= u1; ++u) {
        const Eigen::Vector2d p(u, v);
        const double e0 = edge(s[0], s[1], p);
        const double e1 = edge(s[1], s[2], p);
        const double e2 = edge(s[2], s[0], p);
        const bool inside = area > 0.0 ? (e0 >= 0.0 && e1 >= 0.0 && e2 >= 0.0)
                                       : (e0 <= 0.0 && e1 <= 0.0 && e2 <= 0.0);
        if (!inside) continue;

        // Exact hit point from the pixel ray and the triangle plane.
        const Eigen::Vector3d dir = r_.transpose() * Eigen::Vector3d((u - cx_) / fx_, (v - cy_) / fy_, 1.0);
        const double denom = normal.dot(dir);
        if (std::abs(denom) < 1e-15) continue;
        const double tt = plane_d / denom;
        if (tt <= 0.0) continue;
        const double hit_y = origin_.y() + tt * dir.y();
        if (hit_y < static_cast<double>(depth_.at(v, u))) {
          depth_.at(v, u) = static_cast<float>(hit_y);
          sem_.at(v, u) = static_cast<std::uint8_t>(tri.cls);
        }
      }
    }
  }

  static double edge(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
    return (b - a).x() * (p - a).y() - (b - a).y() * (p - a).x();
  }

  const CameraModel& cam_;
  Raster<float>& depth_;
  Raster<std::uint8_t>& sem_;
  Eigen::Matrix3d r_;
  Eigen::Vector3d t_;
  Eigen::Vector3d origin_;
  double fx_, fy_, cx_, cy_;
};

// Two triangles covering the quad (l0, r0) -- (l1, r1).
template <typename Emit>
void emit_strip_quad(const Eigen::Vector3d& l0, const Eigen::Vector3d& r0, const Eigen::Vector3d& l1,
                     const Eigen::Vector3d& r1, SemanticClass cls, Emit&& emit) {
  emit(Triangle{l0, r0, r1, cls});
  emit(Triangle{l0, r1, l1, cls});
}

void emit_box(const Box3& box, std::vector<Triangle>& out) {
  const double x0 = box.cx - box.size_x / 2.0, x1 = box.cx + box.size_x / 2.0;
  const double y0 = box.cy - box.size_y / 2.0, y1 = box.cy + box.size_y / 2.0;
  const double z0 = box.base_z, z1 = box.base_z + box.size_z;
  const Eigen::Vector3d v000(x0, y0, z0), v100(x1, y0, z0), v010(x0, y1, z0), v110(x1, y1, z0);
  const Eigen::Vector3d v001(x0, y0, z1), v101(x1, y0, z1), v011(x0, y1, z1), v111(x1, y1, z1);
  const auto quad = [&out](const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c,
                           const Eigen::Vector3d& d) {
    out.push_back({a, b, c, SemanticClass::Vehicle});
    out.push_back({a, c, d, SemanticClass::Vehicle});
  };
  quad(v000, v100, v101, v001);  // front (small y)
  quad(v010, v110, v111, v011);  // back
  quad(v000, v010, v011, v001);  // left
  quad(v100, v110, v111, v101);  // right
  quad(v001, v101, v111, v011);  // top
  quad(v000, v100, v110, v010);  // bottom
}

void validate_spec(const RoadSpec& spec) {
  if (!(spec.y_start < spec.y_end)) {
    throw InvalidSpec("y_span must satisfy y_start < y_end");
  }
  if (spec.centerline_coeffs.empty()) {
    throw InvalidSpec("centerline_coeffs must not be empty");
  }
  if (spec.height_knots.empty()) {
    throw InvalidSpec("height_profile needs at least one knot");
  }
  for (std::size_t i = 1; i < spec.height_knots.size(); ++i) {
    if (!(spec.height_knots[i].first > spec.height_knots[i - 1].first)) {
      throw InvalidSpec("height_profile knots must have strictly increasing y");
    }
  }
  if (spec.lane_offsets.size() < 2) {
    throw InvalidSpec("lane_offsets needs at least two lanelines");
  }
  if (!std::is_sorted(spec.lane_offsets.begin(), spec.lane_offsets.end())) {
    throw InvalidSpec("lane_offsets must be ascending");
  }
}

}  // namespace

double RoadSpec::center_x(double y) const {
  double acc = 0.0;
  for (auto it = centerline_coeffs.rbegin(); it != centerline_coeffs.rend(); ++it) {
    acc = acc * y + *it;
  }
  return acc;
}

double RoadSpec::height_z(double y) const {
  const auto& knots = height_knots;
  if (y <= knots.front().first) return knots.front().second;
  if (y >= knots.back().first) return knots.back().second;
  std::size_t hi = 1;
  while (hi < knots.size() - 1 && knots[hi].first < y) ++hi;
  const auto& [ya, za] = knots[hi - 1];
  const auto& [yb, zb] = knots[hi];
  const double w = (y - ya) / (yb - ya);
  return za + w * (zb - za);
}

const char* to_string(OcclusionType t) {
  switch (t) {
    case OcclusionType::Visible: return "visible";
    case OcclusionType::ForegroundOccluded: return "foreground_occluded";
    case OcclusionType::BackgroundOccluded: return "background_occluded";
    case OcclusionType::OutOfImage: return "out_of_image";
    case OcclusionType::BeyondRange: return "beyond_range";
  }
  return "visible";
}

SceneFixture generate_scene(const RoadSpec& spec, std::uint64_t seed, const GenConfig& cfg) {
  validate_spec(spec);
  SeededRng rng(seed);

  SceneFixture fx;
  fx.camera.height_m = rng.uniform(cfg.height_min, cfg.height_max);
  fx.camera.pitch_rad = rng.uniform(cfg.pitch_min_deg, cfg.pitch_max_deg) * M_PI / 180.0;
  fx.camera.intrinsics = cfg.intrinsics;
  fx.camera.image_width = cfg.image_width;
  fx.camera.image_height = cfg.image_height;

  for (const auto& [y, z] : spec.height_knots) {
    (void)y;
    if (!(std::abs(z) < fx.camera.height_m)) {
      throw InvalidSpec("height profile reaches the camera height");
    }
  }

  // Sample y positions once; every lane shares them.
  std::vector<double> ys;
  for (double y = spec.y_start; y <= spec.y_end + 1e-9; y += cfg.lane_step) {
    ys.push_back(std::min(y, spec.y_end));
  }

  const auto make_lane = [&](double offset, LaneCategory cat) {
    Lane3D lane;
    lane.category = cat;
    lane.prob = 1.0;
    for (double y : ys) {
      lane.points.push_back({spec.center_x(y) + offset, y, spec.height_z(y)});
      lane.visibility.push_back(1);
    }
    return lane;
  };
  for (double offset : spec.lane_offsets) {
    fx.lanes_gt.push_back(make_lane(offset, LaneCategory::Laneline));
  }
  for (std::size_t i = 1; i < spec.lane_offsets.size(); ++i) {
    fx.lanes_gt.push_back(
        make_lane((spec.lane_offsets[i - 1] + spec.lane_offsets[i]) / 2.0, LaneCategory::Centerline));
  }

  if (!cfg.fixed_boxes.empty()) {
    fx.occluders = cfg.fixed_boxes;
  } else {
    const int vehicle_count = rng.uniform_int(cfg.min_vehicles, cfg.max_vehicles);
    for (int i = 0; i < vehicle_count; ++i) {
      Box3 box;
      const double offset = spec.lane_offsets[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(spec.lane_offsets.size()) - 1))];
      const double y_hi = std::min(spec.y_end, 90.0);
      box.cy = rng.uniform(std::min(spec.y_start + 5.0, y_hi), y_hi);
      box.cx = spec.center_x(box.cy) + offset + rng.uniform(-0.3, 0.3);
      box.size_x = rng.uniform(1.6, 2.0);
      box.size_y = rng.uniform(3.8, 4.6);
      box.size_z = rng.uniform(1.3, 1.7);
      box.base_z = spec.height_z(box.cy);
      fx.occluders.push_back(box);
    }
  }

  fx.depth_map = Raster<float>(cfg.image_width, cfg.image_height, std::numeric_limits<float>::infinity());
  fx.semantic_map =
      Raster<std::uint8_t>(cfg.image_width, cfg.image_height, static_cast<std::uint8_t>(SemanticClass::Sky));

  SceneRasterizer raster(fx.camera, fx.depth_map, fx.semantic_map);
  std::vector<Triangle> tris;
  const double road_left = spec.lane_offsets.front() - cfg.road_margin;
  const double road_right = spec.lane_offsets.back() + cfg.road_margin;
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
    const double y0 = ys[i], y1 = ys[i + 1];
    const double xc0 = spec.center_x(y0), xc1 = spec.center_x(y1);
    const double z0 = spec.height_z(y0), z1 = spec.height_z(y1);
    emit_strip_quad({xc0 + road_left, y0, z0}, {xc0 + road_right, y0, z0}, {xc1 + road_left, y1, z1},
                    {xc1 + road_right, y1, z1}, SemanticClass::Road,
                    [&tris](const Triangle& t) { tris.push_back(t); });
    emit_strip_quad({xc0 + road_left - cfg.terrain_width, y0, z0}, {xc0 + road_left, y0, z0},
                    {xc1 + road_left - cfg.terrain_width, y1, z1}, {xc1 + road_left, y1, z1},
                    SemanticClass::Terrain, [&tris](const Triangle& t) { tris.push_back(t); });
    emit_strip_quad({xc0 + road_right, y0, z0}, {xc0 + road_right + cfg.terrain_width, y0, z0},
                    {xc1 + road_right, y1, z1}, {xc1 + road_right + cfg.terrain_width, y1, z1},
                    SemanticClass::Terrain, [&tris](const Triangle& t) { tris.push_back(t); });
  }
  for (const Box3& box : fx.occluders) {
    emit_box(box, tris);
  }
  for (const Triangle& tri : tris) {
    raster.draw(tri);
  }
  return fx;
}

std::vector<std::vector<OcclusionType>> label_occlusion(const SceneFixture& fixture, double eps,
                                                        double max_range) {
  const CameraModel& cam = fixture.camera;
  std::vector<std::vector<OcclusionType>> labels;
  labels.reserve(fixture.lanes_gt.size());
  for (const Lane3D& lane : fixture.lanes_gt) {
    std::vector<OcclusionType> lane_labels;
    lane_labels.reserve(lane.points.size());
    for (const EgoPoint& p : lane.points) {
      OcclusionType label = OcclusionType::Visible;
      int u = -1, v = -1;
      bool in_image = false;
      try {
        const ImagePoint img = project_to_image(cam, p);
        u = static_cast<int>(std::lround(img.u));
        v = static_cast<int>(std::lround(img.v));
        in_image = fixture.depth_map.contains(v, u);
      } catch (const PointBehindCamera&) {
        in_image = false;
      }
      const double dx = p.x, dy = p.y, dz = p.z - cam.height_m;
      const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);

      if (!in_image) {
        label = OcclusionType::OutOfImage;
      } else if (dist > max_range) {
        label = OcclusionType::BeyondRange;
      } else if (p.y - static_cast<double>(fixture.depth_map.at(v, u)) > eps) {
        label = fixture.semantic_map.at(v, u) == static_cast<std::uint8_t>(SemanticClass::Vehicle)
                    ? OcclusionType::ForegroundOccluded
                    : OcclusionType::BackgroundOccluded;
      }
      lane_labels.push_back(label);
    }
    labels.push_back(std::move(lane_labels));
  }
  return labels;
}

std::vector<Lane3D> finalize_ground_truth(const std::vector<Lane3D>& lanes,
                                          const std::vector<std::vector<OcclusionType>>& labels) {
  if (labels.size() != lanes.size()) {
    throw LengthMismatch("labels are not aligned with lanes");
  }
  std::vector<Lane3D> out;
  for (std::size_t li = 0; li < lanes.size(); ++li) {
    const Lane3D& lane = lanes[li];
    if (labels[li].size() != lane.points.size()) {
      throw LengthMismatch("labels are not aligned with lane points");
    }
    Lane3D kept;
    kept.category = lane.category;
    kept.prob = lane.prob;
    for (std::size_t i = 0; i < lane.points.size(); ++i) {
      const OcclusionType t = labels[li][i];
      if (t == OcclusionType::Visible || t == OcclusionType::ForegroundOccluded) {
        kept.points.push_back(lane.points[i]);
        kept.visibility.push_back(1);
      }
    }
    if (kept.points.size() >= 2) {
      out.push_back(std::move(kept));
    }
  }
  return out;
}

std::vector<Lane3D> perturb_predictions(const std::vector<Lane3D>& gt, std::uint64_t seed,
                                        const PerturbNoise& noise) {
  SeededRng rng(seed);
  std::vector<Lane3D> out;

  for (const Lane3D& lane : gt) {
    if (rng.uniform01() < noise.drop_rate) continue;
    Lane3D pred = lane;
    for (EgoPoint& p : pred.points) {
      p.x += rng.gaussian(0.0, noise.sigma_x);
      p.z += rng.gaussian(0.0, noise.sigma_z);
    }
    pred.prob = noise.true_prob_min == noise.true_prob_max
                    ? noise.true_prob_min
                    : rng.uniform(noise.true_prob_min, noise.true_prob_max);
    out.push_back(std::move(pred));
  }

  for (const Lane3D& lane : gt) {
    if (rng.uniform01() >= noise.spurious_rate) continue;
    Lane3D spurious = lane;
    const double side = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    const double shift = side * (3.0 + rng.uniform(0.0, 2.0));
    for (EgoPoint& p : spurious.points) {
      p.x += shift + rng.gaussian(0.0, noise.sigma_x);
      p.z += rng.gaussian(0.0, noise.sigma_z);
    }
    spurious.prob = rng.uniform(noise.spurious_prob_min, noise.spurious_prob_max);
    out.push_back(std::move(spurious));
  }
  return out;
}

}  // namespace lane3d
