#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vrecon/core/error.hpp"

namespace vrecon::img {

// Row-major single-channel raster with values in [0,1].
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  GrayImage() = default;
  GrayImage(int w, int h, float fill = 0.0f) : width(w), height(h), data(checked_size(w, h), fill) {}

  float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  bool empty() const { return width == 0 || height == 0; }
  bool operator==(const GrayImage&) const = default;

  static std::size_t checked_size(int w, int h) {
    if (w < 0 || h < 0) throw Error(ErrorCode::Dimension, "negative image dimension");
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  }
};

using Vec3f = std::array<float, 3>;

// Row-major 3-channel raster (RGB colour or world-space normals).
struct VectorImage {
  int width = 0;
  int height = 0;
  std::vector<Vec3f> data;

  VectorImage() = default;
  VectorImage(int w, int h, Vec3f fill = {0, 0, 0})
      : width(w), height(h), data(GrayImage::checked_size(w, h), fill) {}

  Vec3f& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  const Vec3f& at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const VectorImage&) const = default;
};

// 0 is background; components are 1..count.
struct LabelImage {
  int width = 0;
  int height = 0;
  int count = 0;
  std::vector<std::int32_t> labels;

  std::int32_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

}  // namespace vrecon::img
