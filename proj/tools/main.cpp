// lane3d command-line tool: geometry transforms, anchor encode/decode, loss
// evaluation, fixture generation, occlusion labeling, and the lane metric.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "lane3d/anchor.hpp"
#include "lane3d/fixtures.hpp"
#include "lane3d/io.hpp"
#include "lane3d/loss.hpp"
#include "lane3d/metrics.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct EvalArgs {
  std::string gt_path, pred_path, out_path, config_path, dump_matches_path;
  std::vector<double> thresholds;
  double d_max = -1.0, match_fraction = -1.0, near_far_split = -1.0;
};

lane3d::EvalConfig load_config(const std::string& config_path) {
  lane3d::EvalConfig cfg;
  if (!config_path.empty()) {
    cfg = lane3d::parse_config_file(config_path, cfg);
  }
  return cfg;
}

std::vector<lane3d::EvalFrame> join_frames(const std::vector<lane3d::FrameRecord>& gts,
                                           const std::vector<lane3d::FrameRecord>& preds) {
  std::map<std::string, const lane3d::FrameRecord*> by_id;
  for (const auto& rec : preds) {
    if (!by_id.emplace(rec.frame_id, &rec).second) {
      throw lane3d::SchemaError("frame_id", "duplicate prediction frame '" + rec.frame_id + "'");
    }
  }
  std::vector<lane3d::EvalFrame> frames;
  frames.reserve(gts.size());
  std::size_t used = 0;
  for (const auto& rec : gts) {
    lane3d::EvalFrame frame;
    frame.gts = rec.lanes;
    const auto it = by_id.find(rec.frame_id);
    if (it != by_id.end()) {
      frame.preds = it->second->lanes;
      ++used;
    }
    frames.push_back(std::move(frame));
  }
  if (used != by_id.size()) {
    throw lane3d::SchemaError("frame_id", "prediction file contains frames absent from the ground truth");
  }
  return frames;
}

void print_summary(const lane3d::EvalReport& report) {
  std::printf("%-12s %8s %8s %8s %8s %8s %8s %7s %7s %8s\n", "category", "AP", "F-max", "x-near",
              "x-far", "z-near", "z-far", "gt", "pred", "matched");
  for (lane3d::LaneCategory cat : {lane3d::LaneCategory::Laneline, lane3d::LaneCategory::Centerline}) {
    const lane3d::CategoryReport& r = report.category(cat);
    std::printf("%-12s %8.4f %8.4f %8.4f %8.4f %8.4f %8.4f %7ld %7ld %8ld\n", to_string(cat), r.ap,
                r.f_max, r.x_err_near, r.x_err_far, r.z_err_near, r.z_err_far, r.gt_count,
                r.pred_count, r.matched_preds);
  }
}

void dump_matches(const std::string& path, const std::vector<lane3d::FrameRecord>& gts,
                  const std::vector<lane3d::EvalFrame>& frames, const lane3d::EvalReport& report,
                  const lane3d::MatchConfig& match_cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw lane3d::Error("cannot write " + path);
  }
  for (std::size_t fi = 0; fi < frames.size(); ++fi) {
    for (lane3d::LaneCategory cat : {lane3d::LaneCategory::Laneline, lane3d::LaneCategory::Centerline}) {
      const double tau = report.category(cat).best_threshold;
      std::vector<lane3d::Lane3D> preds, gt_lanes;
      for (const auto& lane : frames[fi].preds) {
        if (lane.category == cat && lane.prob >= tau) preds.push_back(lane);
      }
      for (const auto& lane : frames[fi].gts) {
        if (lane.category == cat) gt_lanes.push_back(lane);
      }
      const lane3d::MatchReport mr = lane3d::match_frame(preds, gt_lanes, match_cfg);
      json pairs = json::array();
      for (const auto& pair : mr.assignment) {
        pairs.push_back(json{{"pred", pair.pred},
                             {"gt", pair.gt},
                             {"cost", pair.cost},
                             {"pred_matched", static_cast<bool>(mr.pred_matched[pair.pred])},
                             {"gt_matched", static_cast<bool>(mr.gt_matched[pair.gt])}});
      }
      const json line{{"frame_id", gts[fi].frame_id},
                              {"category", to_string(cat)},
                              {"threshold", tau},
                              {"assignment", std::move(pairs)}};
      out << line.dump() << '\n';
    }
  }
}

int run_eval(const EvalArgs& args) {
  lane3d::EvalConfig cfg = load_config(args.config_path);
  if (!args.thresholds.empty()) cfg.thresholds = args.thresholds;
  if (args.d_max > 0.0) cfg.match.d_max = args.d_max;
  if (args.match_fraction > 0.0) cfg.match.match_fraction = args.match_fraction;
  if (args.near_far_split > 0.0) cfg.match.near_far_split = args.near_far_split;

  const auto gt_frames = lane3d::read_frames_jsonl(args.gt_path);
  const auto pred_frames = lane3d::read_frames_jsonl(args.pred_path);
  const auto frames = join_frames(gt_frames, pred_frames);

  const lane3d::EvalReport report = lane3d::evaluate(frames, cfg.match, cfg.effective_thresholds());

  std::ofstream out(args.out_path, std::ios::binary);
  if (!out) {
    throw lane3d::Error("cannot write " + args.out_path);
  }
  out << lane3d::eval_report_to_json(report, cfg).dump(2) << '\n';
  if (!args.dump_matches_path.empty()) {
    dump_matches(args.dump_matches_path, gt_frames, frames, report, cfg.match);
  }
  print_summary(report);
  return 0;
}

lane3d::RoadSpec road_spec_from_json(const json& j) {
  lane3d::RoadSpec spec;
  if (j.contains("centerline_coeffs")) {
    spec.centerline_coeffs = j["centerline_coeffs"].get<std::vector<double>>();
  }
  if (j.contains("height_knots")) {
    spec.height_knots.clear();
    for (const json& knot : j["height_knots"]) {
      if (!knot.is_array() || knot.size() != 2) {
        throw lane3d::SchemaError("height_knots", "expected [y, z] pairs");
      }
      spec.height_knots.emplace_back(knot[0].get<double>(), knot[1].get<double>());
    }
  }
  if (j.contains("lane_offsets")) {
    spec.lane_offsets = j["lane_offsets"].get<std::vector<double>>();
  }
  if (j.contains("y_span")) {
    const json& span = j["y_span"];
    if (!span.is_array() || span.size() != 2) {
      throw lane3d::SchemaError("y_span", "expected [y_start, y_end]");
    }
    spec.y_start = span[0].get<double>();
    spec.y_end = span[1].get<double>();
  }
  return spec;
}

lane3d::GenConfig gen_config_from_json(const json& j) {
  lane3d::GenConfig cfg;
  if (j.contains("camera")) {
    const json& cam = j["camera"];
    if (cam.contains("height_range")) {
      cfg.height_min = cam["height_range"][0].get<double>();
      cfg.height_max = cam["height_range"][1].get<double>();
    }
    if (cam.contains("pitch_range_deg")) {
      cfg.pitch_min_deg = cam["pitch_range_deg"][0].get<double>();
      cfg.pitch_max_deg = cam["pitch_range_deg"][1].get<double>();
    }
    if (cam.contains("K")) {
      const auto k = cam["K"].get<std::vector<double>>();
      if (k.size() != 9) {
        throw lane3d::SchemaError("camera.K", "expected 9 row-major values");
      }
      for (int i = 0; i < 9; ++i) cfg.intrinsics(i / 3, i % 3) = k[i];
    }
    if (cam.contains("width")) cfg.image_width = cam["width"].get<int>();
    if (cam.contains("height")) cfg.image_height = cam["height"].get<int>();
  }
  if (j.contains("vehicles")) {
    cfg.min_vehicles = j["vehicles"].value("min", cfg.min_vehicles);
    cfg.max_vehicles = j["vehicles"].value("max", cfg.max_vehicles);
  }
  return cfg;
}

int run_fixtures_gen(const std::string& spec_path, std::uint64_t seed, const std::string& out_dir,
                     int frame_count, bool write_rasters, double eps, double max_range) {
  std::ifstream in(spec_path, std::ios::binary);
  if (!in) {
    throw lane3d::Error("cannot open " + spec_path);
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw lane3d::InvalidSpec(std::string("bad road spec: ") + e.what());
  }
  const lane3d::RoadSpec spec = road_spec_from_json(j);
  const lane3d::GenConfig gen_cfg = gen_config_from_json(j);

  fs::create_directories(out_dir);
  std::vector<lane3d::FrameRecord> final_frames, raw_frames;
  for (int i = 0; i < frame_count; ++i) {
    lane3d::SceneFixture fx = lane3d::generate_scene(spec, seed + static_cast<std::uint64_t>(i), gen_cfg);
    char id[32];
    std::snprintf(id, sizeof(id), "frame_%06d", i);
    fx.frame_id = id;

    const auto labels = lane3d::label_occlusion(fx, eps, max_range);
    raw_frames.push_back({fx.frame_id, fx.camera, fx.lanes_gt});
    final_frames.push_back({fx.frame_id, fx.camera, lane3d::finalize_ground_truth(fx.lanes_gt, labels)});
    if (write_rasters) {
      lane3d::write_raster(fs::path(out_dir) / ("depth_" + fx.frame_id + ".l3dr"), fx.depth_map);
      lane3d::write_raster(fs::path(out_dir) / ("semantic_" + fx.frame_id + ".l3dr"), fx.semantic_map);
    }
  }
  lane3d::write_frames_jsonl(fs::path(out_dir) / "frames.jsonl", final_frames);
  lane3d::write_frames_jsonl(fs::path(out_dir) / "lanes_raw.jsonl", raw_frames);
  std::printf("wrote %d frame(s) to %s\n", frame_count, out_dir.c_str());
  return 0;
}

int run_occlusion_label(const std::string& scene_dir, double eps, double max_range,
                        const std::string& out_path, const std::string& finalized_path) {
  const auto raw = lane3d::read_frames_jsonl(fs::path(scene_dir) / "lanes_raw.jsonl");
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw lane3d::Error("cannot write " + out_path);
  }
  std::vector<lane3d::FrameRecord> finalized;
  for (const auto& rec : raw) {
    lane3d::SceneFixture fx;
    fx.frame_id = rec.frame_id;
    fx.camera = rec.camera;
    fx.lanes_gt = rec.lanes;
    fx.depth_map = lane3d::read_raster_f32(fs::path(scene_dir) / ("depth_" + rec.frame_id + ".l3dr"));
    fx.semantic_map =
        lane3d::read_raster_u8(fs::path(scene_dir) / ("semantic_" + rec.frame_id + ".l3dr"));

    const auto labels = lane3d::label_occlusion(fx, eps, max_range);
    json lanes = json::array();
    for (const auto& lane_labels : labels) {
      json one = json::array();
      for (lane3d::OcclusionType t : lane_labels) {
        one.push_back(to_string(t));
      }
      lanes.push_back(std::move(one));
    }
    out << json{{"frame_id", rec.frame_id}, {"labels", std::move(lanes)}}.dump() << '\n';
    if (!finalized_path.empty()) {
      finalized.push_back({rec.frame_id, rec.camera, lane3d::finalize_ground_truth(rec.lanes, labels)});
    }
  }
  if (!finalized_path.empty()) {
    lane3d::write_frames_jsonl(finalized_path, finalized);
  }
  return 0;
}

lane3d::AnchorConfig shape_config_for(const lane3d::AnchorConfig& base, const lane3d::AnchorTensor& t,
                                      bool explicit_config) {
  if (explicit_config) return base;
  // Without a config file the loss only needs the tensor shape.
  lane3d::AnchorConfig cfg = base;
  cfg.anchor_x_positions.assign(static_cast<std::size_t>(t.laneline.x_offsets.rows()), 0.0);
  cfg.y_positions.assign(static_cast<std::size_t>(t.laneline.x_offsets.cols()), 0.0);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"monocular 3D lane geometry, anchor codec, and evaluation toolkit"};
  app.require_subcommand(1);

  // eval
  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "evaluate predicted lanes against ground truth");
  eval->add_option("--gt", eval_args.gt_path, "ground-truth frames (JSONL)")->required();
  eval->add_option("--pred", eval_args.pred_path, "predicted frames (JSONL)")->required();
  eval->add_option("--out", eval_args.out_path, "output report (JSON)")->required();
  eval->add_option("--config", eval_args.config_path, "flat key = value config file");
  eval->add_option("--thresholds", eval_args.thresholds, "confidence thresholds to sweep")->delimiter(',');
  eval->add_option("--d-max", eval_args.d_max, "max-allowed point-wise distance (m)");
  eval->add_option("--match-fraction", eval_args.match_fraction, "fraction of covered positions required");
  eval->add_option("--near-far-split", eval_args.near_far_split, "near/far split distance (m)");
  eval->add_option("--dump-matches", eval_args.dump_matches_path, "per-frame match dump (JSONL)");

  // transform
  CLI::App* transform = app.add_subcommand("transform", "convert points between top-view and ego frames");
  bool to_ego = false, to_topview = false;
  double tf_height = 0.0, tf_z = 0.0;
  std::vector<double> tf_coords;
  transform->add_flag("--to-ego", to_ego, "top-view (x, y) with --z to ego");
  transform->add_flag("--to-topview", to_topview, "ego (x, y, z) to top-view");
  transform->add_option("--height", tf_height, "camera height (m)")->required();
  transform->add_option("--z", tf_z, "point height for --to-ego (m)");
  transform->add_option("coords", tf_coords, "point coordinates");

  // anchors encode/decode
  CLI::App* anchors = app.add_subcommand("anchors", "anchor tensor codec");
  anchors->require_subcommand(1);
  std::string an_in, an_out, an_config;
  double an_prob_thr = -1.0, an_vis_thr = -1.0;
  CLI::App* an_encode = anchors->add_subcommand("encode", "frames (JSONL) -> anchor tensors (JSONL)");
  an_encode->add_option("--in", an_in, "input frames")->required();
  an_encode->add_option("--out", an_out, "output tensors")->required();
  an_encode->add_option("--config", an_config, "flat key = value config file");
  CLI::App* an_decode = anchors->add_subcommand("decode", "anchor tensors (JSONL) -> frames (JSONL)");
  an_decode->add_option("--in", an_in, "input tensors")->required();
  an_decode->add_option("--out", an_out, "output frames")->required();
  an_decode->add_option("--config", an_config, "flat key = value config file");
  an_decode->add_option("--prob-threshold", an_prob_thr, "existence threshold (default 0.5)");
  an_decode->add_option("--vis-threshold", an_vis_thr, "visibility threshold (default 0.5)");

  // loss
  std::string loss_pred, loss_gt, loss_config;
  CLI::App* loss_cmd = app.add_subcommand("loss", "anchor loss between two tensor files");
  loss_cmd->add_option("--pred", loss_pred, "predicted tensors (JSONL)")->required();
  loss_cmd->add_option("--gt", loss_gt, "ground-truth tensors (JSONL)")->required();
  loss_cmd->add_option("--config", loss_config, "flat key = value config file");

  // fixtures gen/perturb
  CLI::App* fixtures = app.add_subcommand("fixtures", "synthetic fixture generation");
  fixtures->require_subcommand(1);
  std::string fx_spec, fx_out_dir;
  std::uint64_t fx_seed = 0;
  int fx_frames = 1;
  bool fx_rasters = true;
  double fx_eps = 0.5, fx_max_range = 200.0;
  CLI::App* fx_gen = fixtures->add_subcommand("gen", "generate scenes and ground truth");
  fx_gen->add_option("--spec", fx_spec, "road spec (JSON)")->required();
  fx_gen->add_option("--seed", fx_seed, "base seed")->required();
  fx_gen->add_option("--out-dir", fx_out_dir, "output directory")->required();
  fx_gen->add_option("--frames", fx_frames, "number of frames (default 1)");
  fx_gen->add_flag("--rasters,!--no-rasters", fx_rasters, "write depth/semantic rasters (default on)");
  fx_gen->add_option("--eps", fx_eps, "occlusion depth tolerance (m, default 0.5)");
  fx_gen->add_option("--max-range", fx_max_range, "lane truncation distance (m, default 200)");

  std::string pb_in, pb_out;
  std::uint64_t pb_seed = 0;
  lane3d::PerturbNoise pb_noise;
  CLI::App* fx_perturb = fixtures->add_subcommand("perturb", "derive pseudo-predictions from ground truth");
  fx_perturb->add_option("--in", pb_in, "input frames (JSONL)")->required();
  fx_perturb->add_option("--out", pb_out, "output frames (JSONL)")->required();
  fx_perturb->add_option("--seed", pb_seed, "base seed")->required();
  fx_perturb->add_option("--sigma-x", pb_noise.sigma_x, "x noise sigma (m)");
  fx_perturb->add_option("--sigma-z", pb_noise.sigma_z, "z noise sigma (m)");
  fx_perturb->add_option("--drop-rate", pb_noise.drop_rate, "whole-lane drop probability");
  fx_perturb->add_option("--spurious-rate", pb_noise.spurious_rate, "spurious lane probability");
  fx_perturb->add_option("--true-prob-min", pb_noise.true_prob_min, "true lane prob lower bound");
  fx_perturb->add_option("--true-prob-max", pb_noise.true_prob_max, "true lane prob upper bound");
  fx_perturb->add_option("--spurious-prob-min", pb_noise.spurious_prob_min, "spurious prob lower bound");
  fx_perturb->add_option("--spurious-prob-max", pb_noise.spurious_prob_max, "spurious prob upper bound");

  // occlusion label
  CLI::App* occlusion = app.add_subcommand("occlusion", "occlusion labeling");
  occlusion->require_subcommand(1);
  std::string oc_scene, oc_out, oc_finalized;
  double oc_eps = 0.5, oc_max_range = 200.0;
  CLI::App* oc_label = occlusion->add_subcommand("label", "label lane points from depth/semantic maps");
  oc_label->add_option("--scene", oc_scene, "fixture directory (from fixtures gen)")->required();
  oc_label->add_option("--eps", oc_eps, "depth deviation tolerance (m, default 0.5)");
  oc_label->add_option("--max-range", oc_max_range, "truncation distance (m, default 200)");
  oc_label->add_option("--out", oc_out, "output labels (JSONL)")->required();
  oc_label->add_option("--finalized", oc_finalized, "also write finalized ground truth (JSONL)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*eval) {
      return run_eval(eval_args);
    }
    if (*transform) {
      if (to_ego == to_topview) {
        std::cerr << "transform: pass exactly one of --to-ego / --to-topview\n";
        return 1;
      }
      if (to_ego) {
        if (tf_coords.size() != 2) {
          std::cerr << "transform --to-ego expects two coordinates: x y\n";
          return 1;
        }
        const lane3d::EgoPoint p =
            lane3d::topview_to_ego({tf_coords[0], tf_coords[1]}, tf_z, tf_height);
        std::printf("%.17g %.17g %.17g\n", p.x, p.y, p.z);
      } else {
        if (tf_coords.size() != 3) {
          std::cerr << "transform --to-topview expects three coordinates: x y z\n";
          return 1;
        }
        const lane3d::TopViewPoint p =
            lane3d::ego_to_topview({tf_coords[0], tf_coords[1], tf_coords[2]}, tf_height);
        std::printf("%.17g %.17g\n", p.x, p.y);
      }
      return 0;
    }
    if (*anchors) {
      lane3d::EvalConfig cfg = load_config(an_config);
      if (*an_encode) {
        const auto frames = lane3d::read_frames_jsonl(an_in);
        std::vector<lane3d::TensorRecord> records;
        records.reserve(frames.size());
        for (const auto& rec : frames) {
          lane3d::EncodeResult enc = lane3d::encode(rec.lanes, cfg.anchor, rec.camera.height_m);
          records.push_back({rec.frame_id, rec.camera, std::move(enc.tensor), std::move(enc.collisions)});
        }
        lane3d::write_tensors_jsonl(an_out, records);
      } else {
        const double prob_thr = an_prob_thr >= 0.0 ? an_prob_thr : cfg.prob_threshold;
        const double vis_thr = an_vis_thr >= 0.0 ? an_vis_thr : cfg.vis_threshold;
        const auto records = lane3d::read_tensors_jsonl(an_in);
        std::vector<lane3d::FrameRecord> frames;
        frames.reserve(records.size());
        for (const auto& rec : records) {
          frames.push_back({rec.frame_id, rec.camera,
                            lane3d::decode(rec.tensor, cfg.anchor, rec.camera.height_m, prob_thr,
                                           vis_thr)});
        }
        lane3d::write_frames_jsonl(an_out, frames);
      }
      return 0;
    }
    if (*loss_cmd) {
      const lane3d::EvalConfig cfg = load_config(loss_config);
      const auto preds = lane3d::read_tensors_jsonl(loss_pred);
      const auto gts = lane3d::read_tensors_jsonl(loss_gt);
      std::map<std::string, const lane3d::TensorRecord*> by_id;
      for (const auto& rec : preds) by_id[rec.frame_id] = &rec;
      lane3d::LossBreakdown total;
      for (const auto& gt_rec : gts) {
        const auto it = by_id.find(gt_rec.frame_id);
        if (it == by_id.end()) {
          throw lane3d::SchemaError("frame_id", "prediction missing for frame '" + gt_rec.frame_id + "'");
        }
        const lane3d::AnchorConfig shaped =
            shape_config_for(cfg.anchor, gt_rec.tensor, !loss_config.empty());
        const lane3d::LossBreakdown lb = lane3d::loss(it->second->tensor, gt_rec.tensor, shaped);
        total.existence_term += lb.existence_term;
        total.offset_term += lb.offset_term;
        total.height_term += lb.height_term;
        total.visibility_term += lb.visibility_term;
        total.total += lb.total;
      }
      const json out{{"frames", gts.size()},
                             {"existence_term", total.existence_term},
                             {"offset_term", total.offset_term},
                             {"height_term", total.height_term},
                             {"visibility_term", total.visibility_term},
                             {"total", total.total}};
      std::cout << out.dump(2) << '\n';
      return 0;
    }
    if (*fixtures) {
      if (*fx_gen) {
        return run_fixtures_gen(fx_spec, fx_seed, fx_out_dir, fx_frames, fx_rasters, fx_eps,
                                fx_max_range);
      }
      const auto frames = lane3d::read_frames_jsonl(pb_in);
      std::vector<lane3d::FrameRecord> out;
      out.reserve(frames.size());
      for (std::size_t i = 0; i < frames.size(); ++i) {
        out.push_back({frames[i].frame_id, frames[i].camera,
                       lane3d::perturb_predictions(frames[i].lanes,
                                                   pb_seed + static_cast<std::uint64_t>(i), pb_noise)});
      }
      lane3d::write_frames_jsonl(pb_out, out);
      return 0;
    }
    if (*occlusion) {
      return run_occlusion_label(oc_scene, oc_eps, oc_max_range, oc_out, oc_finalized);
    }
  } catch (const lane3d::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
