#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lane3d/lane.hpp"
#include "lane3d/raster.hpp"

namespace lane3d {

/// Parametric road: lateral centerline x(y) as polynomial coefficients
/// (constant term first), piecewise-linear height z(y) knots, and lateral
/// offsets of the lanelines. Centerlines are derived midway between
/// consecutive lanelines.
struct RoadSpec {
  std::vector<double> centerline_coeffs{0.0};
  std::vector<std::pair<double, double>> height_knots{{0.0, 0.0}};
  std::vector<double> lane_offsets{-1.85, 1.85};
  double y_start = 1.0;
  double y_end = 101.0;

  double center_x(double y) const;
  double height_z(double y) const;
};

/// Axis-aligned box occluder sitting on the road surface.
struct Box3 {
  double cx = 0.0;      // lateral center
  double cy = 0.0;      // forward center
  double size_x = 1.8;
  double size_y = 4.2;
  double size_z = 1.5;
  double base_z = 0.0;  // road height under the box
};

enum class SemanticClass : std::uint8_t { Sky = 0, Road = 1, Terrain = 2, Vehicle = 3 };

/// Deterministic synthetic frame: camera, raw ground-truth lanes, and the
/// depth/semantic rasters. The depth map stores ego-frame forward distance y
/// (not camera-frame depth), +inf for sky, so the occlusion rule compares y
/// against it directly.
struct SceneFixture {
  std::string frame_id;
  CameraModel camera;
  std::vector<Lane3D> lanes_gt;
  Raster<float> depth_map;
  Raster<std::uint8_t> semantic_map;
  std::vector<Box3> occluders;
};

enum class OcclusionType : std::uint8_t {
  Visible = 0,
  ForegroundOccluded = 1,
  BackgroundOccluded = 2,
  OutOfImage = 3,
  BeyondRange = 4,
};

const char* to_string(OcclusionType t);

/// Scene randomization ranges and rasterization parameters.
struct GenConfig {
  double height_min = 1.4, height_max = 1.8;          // camera height draw (m)
  double pitch_min_deg = 0.0, pitch_max_deg = 10.0;   // camera pitch draw
  Eigen::Matrix3d intrinsics = make_intrinsics(500.0, 500.0, 240.0, 180.0);
  int image_width = 480;
  int image_height = 360;
  int min_vehicles = 0, max_vehicles = 4;
  double lane_step = 1.0;      // lane sampling interval along y (m)
  double road_margin = 1.0;    // road surface beyond the outer lanelines (m)
  double terrain_width = 30.0; // terrain skirt on each side (m)
  // When non-empty these boxes are used verbatim instead of seeded vehicles,
  // so occlusion fixtures can be compared against closed-form shadows.
  std::vector<Box3> fixed_boxes;

  static GenConfig defaults() { return {}; }
};

/// Builds a scene deterministically from (spec, seed): draws camera height
/// and pitch from the config ranges, samples lanelines and centerlines every
/// lane_step meters, places seeded vehicle boxes on the lanes, and z-buffers
/// road, terrain skirt, and boxes into the depth/semantic maps. Throws
/// InvalidSpec on malformed specs or |z| reaching the camera height.
SceneFixture generate_scene(const RoadSpec& spec, std::uint64_t seed,
                            const GenConfig& cfg = GenConfig::defaults());

/// Occlusion label per lane point: out-of-image when the projection misses
/// the image, beyond-range past max_range meters from the camera center,
/// occluded when the point's y exceeds the depth at its pixel by more than
/// eps (vehicle pixels give foreground, everything else background), and
/// visible otherwise.
std::vector<std::vector<OcclusionType>> label_occlusion(const SceneFixture& fixture,
                                                        double eps = 0.5,
                                                        double max_range = 200.0);

/// Ground-truth post-processing: keeps visible and foreground-occluded
/// points (visibility 1 for both; the detector is expected to recover them),
/// discards background-occluded / out-of-image / beyond-range points, and
/// drops lanes left with fewer than two points.
std::vector<Lane3D> finalize_ground_truth(const std::vector<Lane3D>& lanes,
                                          const std::vector<std::vector<OcclusionType>>& labels);

/// Pseudo-prediction noise model. Defaults leave true lanes at prob 1 and
/// score spurious lanes lower in expectation.
struct PerturbNoise {
  double sigma_x = 0.0;
  double sigma_z = 0.0;
  double drop_rate = 0.0;
  double spurious_rate = 0.0;
  double true_prob_min = 1.0, true_prob_max = 1.0;
  double spurious_prob_min = 0.1, spurious_prob_max = 0.5;
};

/// Deterministic pseudo-predictions: per-point Gaussian noise on x and z,
/// whole-lane drops, and spurious clones offset laterally by at least 3 m.
std::vector<Lane3D> perturb_predictions(const std::vector<Lane3D>& gt, std::uint64_t seed,
                                        const PerturbNoise& noise);

}  // namespace lane3d
