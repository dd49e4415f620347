#include "lane3d/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace lane3d {

namespace {

using json = nlohmann::ordered_json;

constexpr char kRasterMagic[4] = {'L', '3', 'D', 'R'};

const json& require_field(const json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end()) {
    throw SchemaError(name, "missing field");
  }
  return *it;
}

double require_number(const json& j, const char* name) {
  const json& f = require_field(j, name);
  if (!f.is_number()) {
    throw SchemaError(name, "expected a number");
  }
  return f.get<double>();
}

std::string require_string(const json& j, const char* name) {
  const json& f = require_field(j, name);
  if (!f.is_string()) {
    throw SchemaError(name, "expected a string");
  }
  return f.get<std::string>();
}

json camera_to_json(const CameraModel& cam) {
  json k = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      k.push_back(cam.intrinsics(r, c));
    }
  }
  return json{{"height_m", cam.height_m},
              {"pitch_deg", cam.pitch_rad * 180.0 / M_PI},
              {"K", std::move(k)},
              {"width", cam.image_width},
              {"height", cam.image_height}};
}

CameraModel camera_from_json(const json& j) {
  CameraModel cam;
  cam.height_m = require_number(j, "height_m");
  if (!(cam.height_m > 0.0) || !std::isfinite(cam.height_m)) {
    throw SchemaError("height_m", "camera height must be positive");
  }
  const double pitch_deg = require_number(j, "pitch_deg");
  if (!(pitch_deg >= 0.0) || !(pitch_deg < 90.0)) {
    throw SchemaError("pitch_deg", "pitch must lie in [0, 90)");
  }
  cam.pitch_rad = pitch_deg * M_PI / 180.0;

  const json& k = require_field(j, "K");
  if (!k.is_array() || k.size() != 9) {
    throw SchemaError("K", "expected 9 row-major values");
  }
  for (int i = 0; i < 9; ++i) {
    if (!k[i].is_number()) throw SchemaError("K", "expected 9 row-major values");
    cam.intrinsics(i / 3, i % 3) = k[i].get<double>();
  }
  if (!(cam.intrinsics(0, 0) > 0.0) || !(cam.intrinsics(1, 1) > 0.0)) {
    throw SchemaError("K", "focal lengths must be positive");
  }
  if (cam.intrinsics(0, 1) != 0.0 || cam.intrinsics(2, 0) != 0.0 || cam.intrinsics(2, 1) != 0.0 ||
      cam.intrinsics(2, 2) != 1.0 || cam.intrinsics(1, 0) != 0.0) {
    throw SchemaError("K", "expected zero skew and unit bottom row");
  }
  cam.image_width = static_cast<int>(require_number(j, "width"));
  cam.image_height = static_cast<int>(require_number(j, "height"));
  if (cam.image_width <= 0 || cam.image_height <= 0) {
    throw SchemaError("width", "image size must be positive");
  }
  return cam;
}

json lane_to_json(const Lane3D& lane) {
  json points = json::array();
  for (const EgoPoint& p : lane.points) {
    points.push_back(json::array({p.x, p.y, p.z}));
  }
  json vis = json::array();
  for (std::uint8_t v : lane.visibility) {
    vis.push_back(static_cast<int>(v));
  }
  return json{{"category", to_string(lane.category)},
              {"points", std::move(points)},
              {"visibility", std::move(vis)},
              {"prob", lane.prob}};
}

Lane3D lane_from_json(const json& j) {
  Lane3D lane;
  lane.category = lane_category_from_string(require_string(j, "category"));
  const json& points = require_field(j, "points");
  if (!points.is_array()) {
    throw SchemaError("points", "expected an array of [x, y, z]");
  }
  for (const json& p : points) {
    if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number()) {
      throw SchemaError("points", "expected an array of [x, y, z]");
    }
    lane.points.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
  }
  const json& vis = require_field(j, "visibility");
  if (!vis.is_array()) {
    throw SchemaError("visibility", "expected an array of 0/1 flags");
  }
  for (const json& v : vis) {
    if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
      throw SchemaError("visibility", "expected an array of 0/1 flags");
    }
    lane.visibility.push_back(static_cast<std::uint8_t>(v.get<int>()));
  }
  lane.prob = require_number(j, "prob");
  validate_lane(lane);
  return lane;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(m(r, c));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* name) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw SchemaError(name, "expected a 2D array");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols) {
      throw SchemaError(name, "ragged 2D array");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw SchemaError(name, "expected numbers");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

json block_to_json(const AnchorBlock& b) {
  json prob = json::array();
  for (Eigen::Index i = 0; i < b.prob.size(); ++i) {
    prob.push_back(b.prob(i));
  }
  return json{{"x_offsets", matrix_to_json(b.x_offsets)},
              {"z", matrix_to_json(b.heights)},
              {"visibility", matrix_to_json(b.visibility)},
              {"prob", std::move(prob)}};
}

AnchorBlock block_from_json(const json& j, const char* which) {
  AnchorBlock b;
  b.x_offsets = matrix_from_json(require_field(j, "x_offsets"), "x_offsets");
  b.heights = matrix_from_json(require_field(j, "z"), "z");
  b.visibility = matrix_from_json(require_field(j, "visibility"), "visibility");
  const json& prob = require_field(j, "prob");
  if (!prob.is_array()) {
    throw SchemaError("prob", "expected an array");
  }
  b.prob.resize(static_cast<Eigen::Index>(prob.size()));
  for (Eigen::Index i = 0; i < b.prob.size(); ++i) {
    if (!prob[i].is_number()) throw SchemaError("prob", "expected numbers");
    b.prob(i) = prob[i].get<double>();
  }
  if (b.heights.rows() != b.x_offsets.rows() || b.heights.cols() != b.x_offsets.cols() ||
      b.visibility.rows() != b.x_offsets.rows() || b.visibility.cols() != b.x_offsets.cols() ||
      b.prob.size() != b.x_offsets.rows()) {
    throw SchemaError(which, "inconsistent tensor field shapes");
  }
  return b;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  return out;
}

template <typename Record, typename FromJson>
std::vector<Record> read_jsonl(const std::filesystem::path& path, FromJson&& from_json) {
  std::ifstream in = open_input(path);
  std::vector<Record> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(lineno, e.what());
    }
    try {
      records.push_back(from_json(j));
    } catch (const SchemaError&) {
      throw;
    } catch (const json::exception& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return records;
}

void write_raster_bytes(const std::filesystem::path& path, const char* dtype, int width, int height,
                        const void* payload, std::size_t bytes) {
  std::ofstream out = open_output(path);
  out.write(kRasterMagic, 4);
  out.write(dtype, 4);
  const auto put_u32 = [&out](std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
  };
  put_u32(static_cast<std::uint32_t>(width));
  put_u32(static_cast<std::uint32_t>(height));
  out.write(static_cast<const char*>(payload), static_cast<std::streamsize>(bytes));
  if (!out) {
    throw Error("failed writing " + path.string());
  }
}

struct RasterHeader {
  char dtype[4];
  std::uint32_t width;
  std::uint32_t height;
  std::vector<char> payload;
};

RasterHeader read_raster_bytes(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  char magic[4];
  RasterHeader h{};
  if (!in.read(magic, 4) || std::memcmp(magic, kRasterMagic, 4) != 0) {
    throw SchemaError("magic", "not a L3DR raster file: " + path.string());
  }
  if (!in.read(h.dtype, 4)) {
    throw SchemaError("dtype", "truncated raster header");
  }
  const auto get_u32 = [&in]() {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
      throw SchemaError("size", "truncated raster header");
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  };
  h.width = get_u32();
  h.height = get_u32();
  h.payload.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  return h;
}

std::vector<double> parse_double_list(const std::string& value, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw SchemaError(key, "expected a comma-separated number list");
    }
  }
  if (out.empty()) {
    throw SchemaError(key, "empty list");
  }
  return out;
}

json curve_to_json(const std::vector<PRPoint>& curve) {
  json out = json::array();
  for (const PRPoint& p : curve) {
    out.push_back(json{{"threshold", p.threshold},
                               {"precision", p.precision},
                               {"recall", p.recall},
                               {"f_score", p.f_score}});
  }
  return out;
}

json category_to_json(const CategoryReport& r) {
  return json{{"ap", r.ap},
                      {"f_max", r.f_max},
                      {"best_threshold", r.best_threshold},
                      {"x_err_near", r.x_err_near},
                      {"x_err_far", r.x_err_far},
                      {"z_err_near", r.z_err_near},
                      {"z_err_far", r.z_err_far},
                      {"counts",
                       json{{"gt", r.gt_count},
                                    {"pred", r.pred_count},
                                    {"matched_preds", r.matched_preds},
                                    {"matched_gts", r.matched_gts}}},
                      {"curve", curve_to_json(r.curve)}};
}

}  // namespace

std::vector<FrameRecord> read_frames_jsonl(const std::filesystem::path& path) {
  return read_jsonl<FrameRecord>(path, [](const json& j) {
    FrameRecord rec;
    rec.frame_id = require_string(j, "frame_id");
    rec.camera = camera_from_json(require_field(j, "camera"));
    const json& lanes = require_field(j, "lanes");
    if (!lanes.is_array()) {
      throw SchemaError("lanes", "expected an array");
    }
    for (const json& lane : lanes) {
      rec.lanes.push_back(lane_from_json(lane));
    }
    return rec;
  });
}

void write_frames_jsonl(const std::filesystem::path& path, const std::vector<FrameRecord>& frames) {
  std::ofstream out = open_output(path);
  for (const FrameRecord& rec : frames) {
    json lanes = json::array();
    for (const Lane3D& lane : rec.lanes) {
      lanes.push_back(lane_to_json(lane));
    }
    const json j{{"frame_id", rec.frame_id},
                         {"camera", camera_to_json(rec.camera)},
                         {"lanes", std::move(lanes)}};
    out << j.dump() << '\n';
  }
  if (!out) {
    throw Error("failed writing " + path.string());
  }
}

std::vector<TensorRecord> read_tensors_jsonl(const std::filesystem::path& path) {
  return read_jsonl<TensorRecord>(path, [](const json& j) {
    TensorRecord rec;
    rec.frame_id = require_string(j, "frame_id");
    rec.camera = camera_from_json(require_field(j, "camera"));
    rec.tensor.laneline = block_from_json(require_field(j, "laneline"), "laneline");
    rec.tensor.centerline = block_from_json(require_field(j, "centerline"), "centerline");
    if (rec.tensor.centerline.x_offsets.rows() != rec.tensor.laneline.x_offsets.rows() ||
        rec.tensor.centerline.x_offsets.cols() != rec.tensor.laneline.x_offsets.cols()) {
      throw SchemaError("centerline", "category blocks have different shapes");
    }
    if (j.contains("collisions")) {
      for (const json& c : j["collisions"]) {
        AnchorCollision col;
        col.category = lane_category_from_string(require_string(c, "category"));
        col.anchor = static_cast<int>(require_number(c, "anchor"));
        col.kept_lane = static_cast<std::size_t>(require_number(c, "kept"));
        col.dropped_lane = static_cast<std::size_t>(require_number(c, "dropped"));
        rec.collisions.push_back(col);
      }
    }
    return rec;
  });
}

void write_tensors_jsonl(const std::filesystem::path& path, const std::vector<TensorRecord>& records) {
  std::ofstream out = open_output(path);
  for (const TensorRecord& rec : records) {
    json j{{"frame_id", rec.frame_id},
                   {"camera", camera_to_json(rec.camera)},
                   {"laneline", block_to_json(rec.tensor.laneline)},
                   {"centerline", block_to_json(rec.tensor.centerline)}};
    if (!rec.collisions.empty()) {
      json cols = json::array();
      for (const AnchorCollision& c : rec.collisions) {
        cols.push_back(json{{"category", to_string(c.category)},
                            {"anchor", c.anchor},
                            {"kept", c.kept_lane},
                            {"dropped", c.dropped_lane}});
      }
      j["collisions"] = std::move(cols);
    }
    out << j.dump() << '\n';
  }
  if (!out) {
    throw Error("failed writing " + path.string());
  }
}

void write_raster(const std::filesystem::path& path, const Raster<float>& raster) {
  static_assert(sizeof(float) == 4);
  write_raster_bytes(path, "f32\0", raster.width, raster.height, raster.data.data(),
                     raster.data.size() * 4);
}

void write_raster(const std::filesystem::path& path, const Raster<std::uint8_t>& raster) {
  write_raster_bytes(path, "u8\0\0", raster.width, raster.height, raster.data.data(),
                     raster.data.size());
}

Raster<float> read_raster_f32(const std::filesystem::path& path) {
  const RasterHeader h = read_raster_bytes(path);
  if (std::memcmp(h.dtype, "f32\0", 4) != 0) {
    throw SchemaError("dtype", "expected a f32 raster");
  }
  Raster<float> out(static_cast<int>(h.width), static_cast<int>(h.height));
  if (h.payload.size() != out.data.size() * 4) {
    throw SchemaError("payload", "payload length does not match width*height*4");
  }
  std::memcpy(out.data.data(), h.payload.data(), h.payload.size());
  return out;
}

Raster<std::uint8_t> read_raster_u8(const std::filesystem::path& path) {
  const RasterHeader h = read_raster_bytes(path);
  if (std::memcmp(h.dtype, "u8\0\0", 4) != 0) {
    throw SchemaError("dtype", "expected a u8 raster");
  }
  Raster<std::uint8_t> out(static_cast<int>(h.width), static_cast<int>(h.height));
  if (h.payload.size() != out.data.size()) {
    throw SchemaError("payload", "payload length does not match width*height");
  }
  std::memcpy(out.data.data(), h.payload.data(), h.payload.size());
  return out;
}

std::vector<double> EvalConfig::effective_thresholds() const {
  return thresholds.empty() ? default_thresholds() : thresholds;
}

EvalConfig parse_config_file(const std::filesystem::path& path, EvalConfig base) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  bool dense_given = false;
  bool range_given = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(lineno, "expected key = value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto as_number = [&]() {
      try {
        return std::stod(value);
      } catch (const std::exception&) {
        throw SchemaError(key, "expected a number");
      }
    };

    if (key == "d_max") {
      base.match.d_max = as_number();
    } else if (key == "match_fraction") {
      base.match.match_fraction = as_number();
    } else if (key == "near_far_split") {
      base.match.near_far_split = as_number();
    } else if (key == "range_end") {
      base.match.range_end = as_number();
      range_given = true;
    } else if (key == "edited_cost_squared") {
      base.match.edited_cost_squared = as_number() != 0.0;
    } else if (key == "dense_y_positions") {
      base.match.dense_y_positions = parse_double_list(value, key);
      dense_given = true;
    } else if (key == "anchor_x_positions") {
      base.anchor.anchor_x_positions = parse_double_list(value, key);
    } else if (key == "y_positions") {
      base.anchor.y_positions = parse_double_list(value, key);
    } else if (key == "y_ref") {
      base.anchor.y_ref = as_number();
    } else if (key == "grid_x_min") {
      base.anchor.top_view_grid.x_min = as_number();
    } else if (key == "grid_x_max") {
      base.anchor.top_view_grid.x_max = as_number();
    } else if (key == "grid_y_min") {
      base.anchor.top_view_grid.y_min = as_number();
    } else if (key == "grid_y_max") {
      base.anchor.top_view_grid.y_max = as_number();
    } else if (key == "grid_cols") {
      base.anchor.top_view_grid.cols = static_cast<int>(as_number());
    } else if (key == "grid_rows") {
      base.anchor.top_view_grid.rows = static_cast<int>(as_number());
    } else if (key == "prob_threshold") {
      base.prob_threshold = as_number();
    } else if (key == "vis_threshold") {
      base.vis_threshold = as_number();
    } else if (key == "thresholds") {
      base.thresholds = parse_double_list(value, key);
    } else {
      throw SchemaError(key, "unknown config key");
    }
  }
  if (range_given && !dense_given) {
    base.match.dense_y_positions.clear();
    for (double y = 0.0; y <= base.match.range_end + 1e-9; y += 2.0) {
      base.match.dense_y_positions.push_back(y);
    }
  }
  return base;
}

nlohmann::ordered_json config_to_json(const EvalConfig& cfg) {
  return json{
      {"anchor",
       json{{"anchor_x_positions", cfg.anchor.anchor_x_positions},
                    {"y_positions", cfg.anchor.y_positions},
                    {"y_ref", cfg.anchor.y_ref},
                    {"grid",
                     json{{"x_min", cfg.anchor.top_view_grid.x_min},
                                  {"x_max", cfg.anchor.top_view_grid.x_max},
                                  {"y_min", cfg.anchor.top_view_grid.y_min},
                                  {"y_max", cfg.anchor.top_view_grid.y_max},
                                  {"cols", cfg.anchor.top_view_grid.cols},
                                  {"rows", cfg.anchor.top_view_grid.rows}}}}},
      {"match",
       json{{"dense_y_positions", cfg.match.dense_y_positions},
                    {"d_max", cfg.match.d_max},
                    {"match_fraction", cfg.match.match_fraction},
                    {"near_far_split", cfg.match.near_far_split},
                    {"range_end", cfg.match.range_end},
                    {"edited_cost_squared", cfg.match.edited_cost_squared}}},
      {"prob_threshold", cfg.prob_threshold},
      {"vis_threshold", cfg.vis_threshold},
      {"thresholds", cfg.effective_thresholds()}};
}

nlohmann::ordered_json eval_report_to_json(const EvalReport& report, const EvalConfig& cfg) {
  return json{{"config", config_to_json(cfg)},
                      {"laneline", category_to_json(report.laneline)},
                      {"centerline", category_to_json(report.centerline)}};
}

}  // namespace lane3d
