#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lane3d/anchor.hpp"
#include "lane3d/lane.hpp"
#include "lane3d/matching.hpp"
#include "lane3d/metrics.hpp"
#include "lane3d/raster.hpp"

namespace lane3d {

/// One JSONL line of a lane dataset: camera plus lanes of both categories.
/// Pitch is stored in degrees on disk and radians in CameraModel.
struct FrameRecord {
  std::string frame_id;
  CameraModel camera;
  std::vector<Lane3D> lanes;
};

/// One JSONL line of an anchor-tensor dataset.
struct TensorRecord {
  std::string frame_id;
  CameraModel camera;
  AnchorTensor tensor;
  std::vector<AnchorCollision> collisions;
};

std::vector<FrameRecord> read_frames_jsonl(const std::filesystem::path& path);
void write_frames_jsonl(const std::filesystem::path& path, const std::vector<FrameRecord>& frames);

std::vector<TensorRecord> read_tensors_jsonl(const std::filesystem::path& path);
void write_tensors_jsonl(const std::filesystem::path& path, const std::vector<TensorRecord>& records);

// Raster container: magic "L3DR", 4-byte dtype tag ("f32\0" or "u8\0\0"),
// width and height as 32-bit little-endian unsigned, then the row-major
// payload in little-endian byte order.
void write_raster(const std::filesystem::path& path, const Raster<float>& raster);
void write_raster(const std::filesystem::path& path, const Raster<std::uint8_t>& raster);
Raster<float> read_raster_f32(const std::filesystem::path& path);
Raster<std::uint8_t> read_raster_u8(const std::filesystem::path& path);

/// Everything the CLI needs to reproduce a run: anchor layout, matching
/// parameters, decode thresholds, and the confidence sweep.
struct EvalConfig {
  AnchorConfig anchor = AnchorConfig::defaults();
  MatchConfig match = MatchConfig::defaults();
  double prob_threshold = 0.5;
  double vis_threshold = 0.5;
  std::vector<double> thresholds;  // empty means default_thresholds()

  std::vector<double> effective_thresholds() const;
};

/// Parses a flat key = value config file (comments with '#', lists
/// comma-separated) on top of `base`. Unknown keys raise SchemaError.
EvalConfig parse_config_file(const std::filesystem::path& path, EvalConfig base = {});

nlohmann::ordered_json config_to_json(const EvalConfig& cfg);
nlohmann::ordered_json eval_report_to_json(const EvalReport& report, const EvalConfig& cfg);

}  // namespace lane3d
