#include "lane3d/geometry.hpp"

#include <cmath>

namespace lane3d {

namespace {
constexpr double kHalfPi = 1.5707963267948966;
}

Eigen::Matrix3d make_intrinsics(double fx, double fy, double cx, double cy) {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

std::pair<Eigen::Matrix3d, Eigen::Vector3d> rotation_translation(const CameraModel& cam) {
  const double s = std::sin(cam.pitch_rad);
  const double c = std::cos(cam.pitch_rad);
  Eigen::Matrix3d r;
  r << 1.0, 0.0, 0.0,
       0.0, -s, -c,
       0.0, c, -s;
  return {r, Eigen::Vector3d(0.0, c * cam.height_m, s * cam.height_m)};
}

ImagePoint project_to_image(const CameraModel& cam, const EgoPoint& p) {
  const auto [r, t] = rotation_translation(cam);
  const Eigen::Vector3d hom = cam.intrinsics * (r * Eigen::Vector3d(p.x, p.y, p.z) + t);
  if (!(hom.z() > kHomogeneousEps)) {
    throw PointBehindCamera("projective depth is not positive");
  }
  return {hom.x() / hom.z(), hom.y() / hom.z()};
}

Eigen::Matrix3d ground_to_image(const CameraModel& cam) {
  if (!(cam.pitch_rad < kHalfPi)) {
    throw DegenerateHomography("pitch at or beyond pi/2: the ground-to-image map degenerates");
  }
  const auto [r, t] = rotation_translation(cam);
  Eigen::Matrix3d m;
  m.col(0) = r.col(0);
  m.col(1) = r.col(1);
  m.col(2) = t;
  m = cam.intrinsics * m;

  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(m);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(2);
  if (!(smin > 0.0) || smax / smin > kConditionLimit) {
    throw DegenerateHomography("ground homography is numerically singular");
  }
  return m;
}

Eigen::Matrix3d homography_img_to_ground(const CameraModel& cam) {
  return ground_to_image(cam).inverse();
}

EgoPoint topview_to_ego(const TopViewPoint& p, double z, double cam_height) {
  if (!(cam_height > 0.0)) {
    throw HeightAtCameraCenter("camera height must be positive");
  }
  if (!(z < cam_height - kHeightEps)) {
    throw HeightAtCameraCenter("point height reaches the camera center");
  }
  const double f = 1.0 - z / cam_height;
  return {p.x * f, p.y * f, z};
}

TopViewPoint ego_to_topview(const EgoPoint& p, double cam_height) {
  if (!(cam_height > 0.0)) {
    throw HeightAtCameraCenter("camera height must be positive");
  }
  if (!(p.z < cam_height - kHeightEps)) {
    throw HeightAtCameraCenter("point height reaches the camera center");
  }
  const double f = cam_height / (cam_height - p.z);
  return {p.x * f, p.y * f};
}

Raster<std::uint8_t> warp_to_topview(const CameraModel& cam, const Raster<std::uint8_t>& mask,
                                     const TopViewGrid& grid) {
  if (mask.width != cam.image_width || mask.height != cam.image_height) {
    throw ShapeMismatch("mask dimensions do not match the camera image size");
  }
  const Eigen::Matrix3d m = ground_to_image(cam);
  Raster<std::uint8_t> out(grid.cols, grid.rows, 0);
  for (int row = 0; row < grid.rows; ++row) {
    for (int col = 0; col < grid.cols; ++col) {
      const TopViewPoint g = grid.cell_center(row, col);
      const Eigen::Vector3d hom = m * Eigen::Vector3d(g.x, g.y, 1.0);
      if (!(hom.z() > kHomogeneousEps)) {
        continue;
      }
      const long u = std::lround(hom.x() / hom.z());
      const long v = std::lround(hom.y() / hom.z());
      if (mask.contains(static_cast<int>(v), static_cast<int>(u))) {
        out.at(row, col) = mask.at(static_cast<int>(v), static_cast<int>(u));
      }
    }
  }
  return out;
}

}  // namespace lane3d
