#pragma once

#include <cstdint>
#include <vector>

#include "vrecon/img/image.hpp"

namespace vrecon::img {

// A 90-degree crease between two unit normals produces a summed 3-channel
// Sobel response of 8; responses are divided by this and clipped at 1.
inline constexpr float kSobelNormalization = 8.0f;

// Sum over channels of the 3x3 Sobel gradient magnitude, replicate border.
// Throws Dimension when the image is smaller than 3x3.
GrayImage sobel_magnitude(const VectorImage& img);

// Bilinear interpolation with pixel centres at integer coordinates.
// Throws Range when (u, v) lies outside [0, w-1] x [0, h-1].
double bilinear_sample(const GrayImage& img, double u, double v);

// 8-connected labelling of pixels with value > threshold; label 1 is the
// largest component, ties broken by first pixel in scan order.
LabelImage connected_components(const GrayImage& img, float threshold);

struct PixelRect {
  int x = 0, y = 0, w = 0, h = 0;
  std::int64_t area() const { return static_cast<std::int64_t>(w) * h; }
  bool operator==(const PixelRect&) const = default;
};

// Tight bounding rectangles of each component, indexed by label - 1.
std::vector<PixelRect> component_bounds(const LabelImage& labels);

GrayImage crop(const GrayImage& img, const PixelRect& rect);
GrayImage flip_horizontal(const GrayImage& img);
GrayImage transpose(const GrayImage& img);
GrayImage resize_bilinear(const GrayImage& img, int width, int height);
GrayImage invert(const GrayImage& img);
// Pastes `src` into `dst` with its top-left corner at (x, y).
void paste(GrayImage& dst, const GrayImage& src, int x, int y);

// Solid silhouette of a dark-on-light drawing: ink pixels (< ink_threshold)
// plus every light region not connected to the image border.
GrayImage silhouette_from_drawing(const GrayImage& drawing, float ink_threshold = 0.5f);

}  // namespace vrecon::img
