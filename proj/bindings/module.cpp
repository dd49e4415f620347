#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lane3d/anchor.hpp"
#include "lane3d/fixtures.hpp"
#include "lane3d/io.hpp"
#include "lane3d/loss.hpp"
#include "lane3d/metrics.hpp"

namespace py = pybind11;
using namespace lane3d;

namespace {

py::array_t<std::uint8_t> raster_u8_to_numpy(const Raster<std::uint8_t>& r) {
  py::array_t<std::uint8_t> out({r.height, r.width});
  std::memcpy(out.mutable_data(), r.data.data(), r.data.size());
  return out;
}

py::array_t<float> raster_f32_to_numpy(const Raster<float>& r) {
  py::array_t<float> out({r.height, r.width});
  std::memcpy(out.mutable_data(), r.data.data(), r.data.size() * sizeof(float));
  return out;
}

Raster<std::uint8_t> numpy_to_raster_u8(const py::array_t<std::uint8_t>& arr) {
  if (arr.ndim() != 2) {
    throw ShapeMismatch("expected a 2D uint8 array");
  }
  Raster<std::uint8_t> out(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)));
  const auto view = arr.unchecked<2>();
  for (py::ssize_t r = 0; r < arr.shape(0); ++r) {
    for (py::ssize_t c = 0; c < arr.shape(1); ++c) {
      out.at(static_cast<int>(r), static_cast<int>(c)) = view(r, c);
    }
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Geometric core for monocular 3D lane detection: virtual-top-view "
            "transforms, anchor codec, loss evaluator, min-cost-flow lane matching, "
            "and synthetic scene fixtures.";
  m.attr("__version__") = "0.1.0";

  py::register_exception<Error>(m, "Lane3dError");

  py::class_<EgoPoint>(m, "EgoPoint")
      .def(py::init<double, double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0,
           py::arg("z") = 0.0)
      .def_readwrite("x", &EgoPoint::x)
      .def_readwrite("y", &EgoPoint::y)
      .def_readwrite("z", &EgoPoint::z)
      .def("__repr__", [](const EgoPoint& p) {
        return "EgoPoint(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " +
               std::to_string(p.z) + ")";
      });

  py::class_<TopViewPoint>(m, "TopViewPoint")
      .def(py::init<double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0)
      .def_readwrite("x", &TopViewPoint::x)
      .def_readwrite("y", &TopViewPoint::y)
      .def("__repr__", [](const TopViewPoint& p) {
        return "TopViewPoint(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
      });

  py::class_<ImagePoint>(m, "ImagePoint")
      .def(py::init<double, double>(), py::arg("u") = 0.0, py::arg("v") = 0.0)
      .def_readwrite("u", &ImagePoint::u)
      .def_readwrite("v", &ImagePoint::v);

  py::class_<TopViewGrid>(m, "TopViewGrid")
      .def(py::init<>())
      .def_readwrite("x_min", &TopViewGrid::x_min)
      .def_readwrite("x_max", &TopViewGrid::x_max)
      .def_readwrite("y_min", &TopViewGrid::y_min)
      .def_readwrite("y_max", &TopViewGrid::y_max)
      .def_readwrite("cols", &TopViewGrid::cols)
      .def_readwrite("rows", &TopViewGrid::rows)
      .def("cell_center", &TopViewGrid::cell_center);

  py::class_<CameraModel>(m, "CameraModel")
      .def(py::init<>())
      .def_readwrite("height_m", &CameraModel::height_m)
      .def_readwrite("pitch_rad", &CameraModel::pitch_rad)
      .def_readwrite("intrinsics", &CameraModel::intrinsics)
      .def_readwrite("image_width", &CameraModel::image_width)
      .def_readwrite("image_height", &CameraModel::image_height);

  py::enum_<LaneCategory>(m, "LaneCategory")
      .value("Laneline", LaneCategory::Laneline)
      .value("Centerline", LaneCategory::Centerline);

  py::class_<Lane3D>(m, "Lane3D")
      .def(py::init<>())
      .def_readwrite("category", &Lane3D::category)
      .def_readwrite("points", &Lane3D::points)
      .def_readwrite("visibility", &Lane3D::visibility)
      .def_readwrite("prob", &Lane3D::prob);

  m.def("make_intrinsics", &make_intrinsics, py::arg("fx"), py::arg("fy"), py::arg("cx"),
        py::arg("cy"));
  m.def("rotation_translation", &rotation_translation);
  m.def("project_to_image", &project_to_image);
  m.def("ground_to_image", &ground_to_image);
  m.def("homography_img_to_ground", &homography_img_to_ground);
  m.def("topview_to_ego", &topview_to_ego, py::arg("p"), py::arg("z"), py::arg("cam_height"));
  m.def("ego_to_topview", &ego_to_topview, py::arg("p"), py::arg("cam_height"));
  m.def(
      "warp_to_topview",
      [](const CameraModel& cam, const py::array_t<std::uint8_t>& mask, const TopViewGrid& grid) {
        return raster_u8_to_numpy(warp_to_topview(cam, numpy_to_raster_u8(mask), grid));
      },
      py::arg("cam"), py::arg("mask"), py::arg("grid") = kDefaultTopViewGrid);
  m.attr("DEFAULT_TOP_VIEW_GRID") = kDefaultTopViewGrid;

  py::class_<AnchorConfig>(m, "AnchorConfig")
      .def(py::init<>(&AnchorConfig::defaults))
      .def_readwrite("anchor_x_positions", &AnchorConfig::anchor_x_positions)
      .def_readwrite("y_positions", &AnchorConfig::y_positions)
      .def_readwrite("y_ref", &AnchorConfig::y_ref)
      .def_readwrite("top_view_grid", &AnchorConfig::top_view_grid)
      .def_static("defaults", &AnchorConfig::defaults);

  py::class_<AnchorBlock>(m, "AnchorBlock")
      .def_readwrite("x_offsets", &AnchorBlock::x_offsets)
      .def_readwrite("heights", &AnchorBlock::heights)
      .def_readwrite("visibility", &AnchorBlock::visibility)
      .def_readwrite("prob", &AnchorBlock::prob);

  py::class_<AnchorTensor>(m, "AnchorTensor")
      .def_readwrite("laneline", &AnchorTensor::laneline)
      .def_readwrite("centerline", &AnchorTensor::centerline)
      .def_static("zeros", &AnchorTensor::zeros);

  py::class_<AnchorCollision>(m, "AnchorCollision")
      .def_readonly("category", &AnchorCollision::category)
      .def_readonly("anchor", &AnchorCollision::anchor)
      .def_readonly("kept_lane", &AnchorCollision::kept_lane)
      .def_readonly("dropped_lane", &AnchorCollision::dropped_lane);

  py::class_<EncodeResult>(m, "EncodeResult")
      .def_readonly("tensor", &EncodeResult::tensor)
      .def_readonly("collisions", &EncodeResult::collisions);

  m.def("associate_anchor", &associate_anchor, py::arg("lane"), py::arg("cfg"), py::arg("cam_height"));
  m.def("encode", &encode, py::arg("lanes"), py::arg("cfg"), py::arg("cam_height"));
  m.def("decode", &decode, py::arg("tensor"), py::arg("cfg"), py::arg("cam_height"),
        py::arg("prob_threshold") = 0.5, py::arg("vis_threshold") = 0.5);

  py::class_<LossBreakdown>(m, "LossBreakdown")
      .def_readonly("existence_term", &LossBreakdown::existence_term)
      .def_readonly("offset_term", &LossBreakdown::offset_term)
      .def_readonly("height_term", &LossBreakdown::height_term)
      .def_readonly("visibility_term", &LossBreakdown::visibility_term)
      .def_readonly("total", &LossBreakdown::total);
  m.def("loss", &loss, py::arg("pred"), py::arg("gt"), py::arg("cfg"));

  py::class_<MatchConfig>(m, "MatchConfig")
      .def(py::init<>(&MatchConfig::defaults))
      .def_readwrite("dense_y_positions", &MatchConfig::dense_y_positions)
      .def_readwrite("d_max", &MatchConfig::d_max)
      .def_readwrite("match_fraction", &MatchConfig::match_fraction)
      .def_readwrite("near_far_split", &MatchConfig::near_far_split)
      .def_readwrite("range_end", &MatchConfig::range_end)
      .def_readwrite("edited_cost_squared", &MatchConfig::edited_cost_squared)
      .def_static("defaults", &MatchConfig::defaults);

  py::class_<DenseLane>(m, "DenseLane")
      .def(py::init<>())
      .def_readwrite("xs", &DenseLane::xs)
      .def_readwrite("zs", &DenseLane::zs)
      .def_readwrite("covered", &DenseLane::covered)
      .def_readwrite("prob", &DenseLane::prob);

  py::class_<LaneCost>(m, "LaneCost")
      .def_readonly("cost", &LaneCost::cost)
      .def_readonly("pointwise", &LaneCost::pointwise);

  py::class_<MatchedPair>(m, "MatchedPair")
      .def_readonly("pred", &MatchedPair::pred)
      .def_readonly("gt", &MatchedPair::gt)
      .def_readonly("cost", &MatchedPair::cost);

  py::class_<MatchReport>(m, "MatchReport")
      .def_readonly("assignment", &MatchReport::assignment)
      .def_readonly("pred_matched", &MatchReport::pred_matched)
      .def_readonly("gt_matched", &MatchReport::gt_matched)
      .def_readonly("pointwise", &MatchReport::pointwise);

  m.def("densify", &densify, py::arg("lane"), py::arg("cfg"));
  m.def("lane_cost", &lane_cost, py::arg("a"), py::arg("b"), py::arg("cfg"));
  m.def("min_cost_assign", &min_cost_assign, py::arg("cost"));
  m.def("match_frame", &match_frame, py::arg("preds"), py::arg("gts"), py::arg("cfg"));

  py::class_<EvalFrame>(m, "EvalFrame")
      .def(py::init<>())
      .def_readwrite("preds", &EvalFrame::preds)
      .def_readwrite("gts", &EvalFrame::gts);

  py::class_<PRPoint>(m, "PRPoint")
      .def_readonly("threshold", &PRPoint::threshold)
      .def_readonly("precision", &PRPoint::precision)
      .def_readonly("recall", &PRPoint::recall)
      .def_readonly("f_score", &PRPoint::f_score);

  py::class_<CategoryReport>(m, "CategoryReport")
      .def_readonly("ap", &CategoryReport::ap)
      .def_readonly("f_max", &CategoryReport::f_max)
      .def_readonly("best_threshold", &CategoryReport::best_threshold)
      .def_readonly("curve", &CategoryReport::curve)
      .def_readonly("x_err_near", &CategoryReport::x_err_near)
      .def_readonly("x_err_far", &CategoryReport::x_err_far)
      .def_readonly("z_err_near", &CategoryReport::z_err_near)
      .def_readonly("z_err_far", &CategoryReport::z_err_far)
      .def_readonly("gt_count", &CategoryReport::gt_count)
      .def_readonly("pred_count", &CategoryReport::pred_count)
      .def_readonly("matched_preds", &CategoryReport::matched_preds)
      .def_readonly("matched_gts", &CategoryReport::matched_gts);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("laneline", &EvalReport::laneline)
      .def_readonly("centerline", &EvalReport::centerline);

  m.def("default_thresholds", &default_thresholds);
  m.def("pr_at_threshold", &pr_at_threshold, py::arg("frames"), py::arg("category"), py::arg("tau"),
        py::arg("cfg"));
  m.def("evaluate", &evaluate, py::arg("frames"), py::arg("cfg"),
        py::arg("thresholds") = default_thresholds());

  py::class_<RoadSpec>(m, "RoadSpec")
      .def(py::init<>())
      .def_readwrite("centerline_coeffs", &RoadSpec::centerline_coeffs)
      .def_readwrite("height_knots", &RoadSpec::height_knots)
      .def_readwrite("lane_offsets", &RoadSpec::lane_offsets)
      .def_readwrite("y_start", &RoadSpec::y_start)
      .def_readwrite("y_end", &RoadSpec::y_end)
      .def("center_x", &RoadSpec::center_x)
      .def("height_z", &RoadSpec::height_z);

  py::class_<Box3>(m, "Box3")
      .def(py::init<>())
      .def_readwrite("cx", &Box3::cx)
      .def_readwrite("cy", &Box3::cy)
      .def_readwrite("size_x", &Box3::size_x)
      .def_readwrite("size_y", &Box3::size_y)
      .def_readwrite("size_z", &Box3::size_z)
      .def_readwrite("base_z", &Box3::base_z);

  py::enum_<SemanticClass>(m, "SemanticClass")
      .value("Sky", SemanticClass::Sky)
      .value("Road", SemanticClass::Road)
      .value("Terrain", SemanticClass::Terrain)
      .value("Vehicle", SemanticClass::Vehicle);

  py::enum_<OcclusionType>(m, "OcclusionType")
      .value("Visible", OcclusionType::Visible)
      .value("ForegroundOccluded", OcclusionType::ForegroundOccluded)
      .value("BackgroundOccluded", OcclusionType::BackgroundOccluded)
      .value("OutOfImage", OcclusionType::OutOfImage)
      .value("BeyondRange", OcclusionType::BeyondRange);

  py::class_<GenConfig>(m, "GenConfig")
      .def(py::init<>())
      .def_readwrite("height_min", &GenConfig::height_min)
      .def_readwrite("height_max", &GenConfig::height_max)
      .def_readwrite("pitch_min_deg", &GenConfig::pitch_min_deg)
      .def_readwrite("pitch_max_deg", &GenConfig::pitch_max_deg)
      .def_readwrite("intrinsics", &GenConfig::intrinsics)
      .def_readwrite("image_width", &GenConfig::image_width)
      .def_readwrite("image_height", &GenConfig::image_height)
      .def_readwrite("min_vehicles", &GenConfig::min_vehicles)
      .def_readwrite("max_vehicles", &GenConfig::max_vehicles)
      .def_readwrite("lane_step", &GenConfig::lane_step)
      .def_readwrite("road_margin", &GenConfig::road_margin)
      .def_readwrite("terrain_width", &GenConfig::terrain_width)
      .def_readwrite("fixed_boxes", &GenConfig::fixed_boxes);

  py::class_<SceneFixture>(m, "SceneFixture")
      .def_readonly("frame_id", &SceneFixture::frame_id)
      .def_readonly("camera", &SceneFixture::camera)
      .def_readonly("lanes_gt", &SceneFixture::lanes_gt)
      .def_readonly("occluders", &SceneFixture::occluders)
      .def_property_readonly("depth_map",
                             [](const SceneFixture& fx) { return raster_f32_to_numpy(fx.depth_map); })
      .def_property_readonly("semantic_map", [](const SceneFixture& fx) {
        return raster_u8_to_numpy(fx.semantic_map);
      });

  py::class_<PerturbNoise>(m, "PerturbNoise")
      .def(py::init<>())
      .def_readwrite("sigma_x", &PerturbNoise::sigma_x)
      .def_readwrite("sigma_z", &PerturbNoise::sigma_z)
      .def_readwrite("drop_rate", &PerturbNoise::drop_rate)
      .def_readwrite("spurious_rate", &PerturbNoise::spurious_rate)
      .def_readwrite("true_prob_min", &PerturbNoise::true_prob_min)
      .def_readwrite("true_prob_max", &PerturbNoise::true_prob_max)
      .def_readwrite("spurious_prob_min", &PerturbNoise::spurious_prob_min)
      .def_readwrite("spurious_prob_max", &PerturbNoise::spurious_prob_max);

  m.def("generate_scene", &generate_scene, py::arg("spec"), py::arg("seed"),
        py::arg("cfg") = GenConfig::defaults());
  m.def("label_occlusion", &label_occlusion, py::arg("fixture"), py::arg("eps") = 0.5,
        py::arg("max_range") = 200.0);
  m.def("finalize_ground_truth", &finalize_ground_truth, py::arg("lanes"), py::arg("labels"));
  m.def("perturb_predictions", &perturb_predictions, py::arg("gt"), py::arg("seed"), py::arg("noise"));

  py::class_<FrameRecord>(m, "FrameRecord")
      .def(py::init<>())
      .def_readwrite("frame_id", &FrameRecord::frame_id)
      .def_readwrite("camera", &FrameRecord::camera)
      .def_readwrite("lanes", &FrameRecord::lanes);

  m.def("read_frames_jsonl", &read_frames_jsonl, py::arg("path"));
  m.def("write_frames_jsonl", &write_frames_jsonl, py::arg("path"), py::arg("frames"));
}
