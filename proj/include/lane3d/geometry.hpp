#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "lane3d/errors.hpp"
#include "lane3d/raster.hpp"

namespace lane3d {

// Numeric guards used across the geometry operations.
inline constexpr double kHeightEps = 1e-6;       // z may not approach the camera height closer than this
inline constexpr double kHomogeneousEps = 1e-12; // |w| below this rejects dehomogenization
inline constexpr double kConditionLimit = 1e12;  // homography condition-number ceiling

/// Ego-vehicle frame point: x lateral, y forward, z up (meters). The origin
/// is the perpendicular projection of the camera center onto the road, so
/// the camera center sits at (0, 0, h).
struct EgoPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Point in the virtual top-view frame: the image re-projected onto the
/// z = 0 plane. Coordinates generally differ from ego x/y whenever z != 0.
struct TopViewPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Image-plane point in pixels. v grows downward, (0, 0) is the top-left.
struct ImagePoint {
  double u = 0.0;
  double v = 0.0;
};

/// Metric extent and raster resolution of a top-view layer. Row 0 of an
/// associated raster maps to the far edge (y_max), column 0 to x_min.
struct TopViewGrid {
  double x_min = -10.0;
  double x_max = 10.0;
  double y_min = 1.0;
  double y_max = 101.0;
  int cols = 208;
  int rows = 108;

  constexpr TopViewPoint cell_center(int row, int col) const {
    const double dx = (x_max - x_min) / cols;
    const double dy = (y_max - y_min) / rows;
    return {x_min + (col + 0.5) * dx, y_max - (row + 0.5) * dy};
  }

  constexpr bool contains_y(double y) const { return y >= y_min && y <= y_max; }
};

/// Default top-view extent ([-10, 10] x [1, 101] m at 208 x 108 cells).
inline constexpr TopViewGrid kDefaultTopViewGrid{};

/// Pinhole camera with pitch-only orientation. height_m is the camera
/// height above the ego origin, pitch_rad the downward pitch in [0, pi/2).
/// intrinsics holds fx, fy, cx, cy with zero skew and unit bottom row.
struct CameraModel {
  double height_m = 1.5;
  double pitch_rad = 0.0;
  Eigen::Matrix3d intrinsics = Eigen::Matrix3d::Identity();
  int image_width = 480;
  int image_height = 360;
};

/// Builds a zero-skew intrinsic matrix from focal lengths and principal point.
Eigen::Matrix3d make_intrinsics(double fx, double fy, double cx, double cy);

/// Extrinsics of the pitch-only camera: R rotates ego coordinates into the
/// camera frame and T translates them, i.e. p_cam = R p_ego + T.
std::pair<Eigen::Matrix3d, Eigen::Vector3d> rotation_translation(const CameraModel& cam);

/// Projects an ego point through K [R|T]. Throws PointBehindCamera when the
/// projective depth is not strictly positive.
ImagePoint project_to_image(const CameraModel& cam, const EgoPoint& p);

/// Planar homography K [r1 r2 T] mapping homogeneous ground points (x, y, 1)
/// on z = 0 to homogeneous image points. Throws DegenerateHomography for
/// pitch >= pi/2 or a numerically singular matrix.
Eigen::Matrix3d ground_to_image(const CameraModel& cam);

/// Inverse of ground_to_image: maps homogeneous image points to the ground
/// plane. Same failure modes.
Eigen::Matrix3d homography_img_to_ground(const CameraModel& cam);

/// Virtual-top-view -> ego transform: x = x_bar (1 - z/h), y = y_bar (1 - z/h).
/// Camera-angle independent. Throws HeightAtCameraCenter when z is within
/// kHeightEps of the camera height (the co-linearity denominator vanishes).
EgoPoint topview_to_ego(const TopViewPoint& p, double z, double cam_height);

/// Exact inverse of topview_to_ego for p.z < cam_height.
TopViewPoint ego_to_topview(const EgoPoint& p, double cam_height);

/// Warps an image-space mask onto the ground plane: each output cell samples
/// the mask at the nearest pixel hit by projecting the cell's ground-plane
/// center; cells projecting outside the image stay 0. Masks are categorical,
/// so sampling is nearest-neighbor.
Raster<std::uint8_t> warp_to_topview(const CameraModel& cam, const Raster<std::uint8_t>& mask,
                                     const TopViewGrid& grid);

}  // namespace lane3d
