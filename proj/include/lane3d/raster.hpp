#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lane3d {

/// Row-major 2D raster. For camera-space rasters row 0 is image v = 0;
/// for top-view rasters row 0 corresponds to the far edge (y_max).
template <typename T>
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Raster() = default;
  Raster(int w, int h, T fill = T{})
      : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  T& at(int row, int col) { return data[static_cast<std::size_t>(row) * width + col]; }
  const T& at(int row, int col) const { return data[static_cast<std::size_t>(row) * width + col]; }

  bool contains(int row, int col) const {
    return row >= 0 && row < height && col >= 0 && col < width;
  }

  bool operator==(const Raster& other) const {
    return width == other.width && height == other.height && data == other.data;
  }
};

}  // namespace lane3d
