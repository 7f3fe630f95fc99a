#include "vrecon/img/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace vrecon::img {

GrayImage sobel_magnitude(const VectorImage& img) {
  if (img.width < 3 || img.height < 3)
    throw Error(ErrorCode::Dimension, "sobel_magnitude needs at least 3x3 pixels, got " +
                                          std::to_string(img.width) + "x" +
                                          std::to_string(img.height));
  const int w = img.width, h = img.height;
  GrayImage out(w, h);
  auto px = [&](int x, int y) -> const Vec3f& {
    return img.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float sum = 0.0f;
      for (int c = 0; c < 3; ++c) {
        const float gx = (px(x + 1, y - 1)[c] + 2.0f * px(x + 1, y)[c] + px(x + 1, y + 1)[c]) -
                         (px(x - 1, y - 1)[c] + 2.0f * px(x - 1, y)[c] + px(x - 1, y + 1)[c]);
        const float gy = (px(x - 1, y + 1)[c] + 2.0f * px(x, y + 1)[c] + px(x + 1, y + 1)[c]) -
                         (px(x - 1, y - 1)[c] + 2.0f * px(x, y - 1)[c] + px(x + 1, y - 1)[c]);
        sum += std::sqrt(gx * gx + gy * gy);
      }
      out.at(x, y) = std::min(1.0f, sum / kSobelNormalization);
    }
  }
  return out;
}

double bilinear_sample(const GrayImage& img, double u, double v) {
  if (img.empty() || !(u >= 0.0 && u <= img.width - 1) || !(v >= 0.0 && v <= img.height - 1))
    throw Error(ErrorCode::Range, "bilinear_sample coordinate (" + std::to_string(u) + ", " +
                                      std::to_string(v) + ") outside image");
  const int x0 = std::min(static_cast<int>(u), std::max(0, img.width - 2));
  const int y0 = std::min(static_cast<int>(v), std::max(0, img.height - 2));
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = u - x0, fy = v - y0;
  const double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
  const double bottom = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
  return top * (1.0 - fy) + bottom * fy;
}

LabelImage connected_components(const GrayImage& img, float threshold) {
  LabelImage out;
  out.width = img.width;
  out.height = img.height;
  out.labels.assign(img.data.size(), 0);
  std::vector<std::int64_t> areas;
  std::vector<std::int32_t> stack;
  const int w = img.width, h = img.height;
  for (int start = 0; start < w * h; ++start) {
    if (out.labels[start] != 0 || !(img.data[start] > threshold)) continue;
    const auto label = static_cast<std::int32_t>(areas.size() + 1);
    std::int64_t area = 0;
    out.labels[start] = label;
    stack.push_back(start);
    while (!stack.empty()) {
      const int idx = stack.back();
      stack.pop_back();
      ++area;
      const int cx = idx % w, cy = idx / w;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = cx + dx, ny = cy + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const int n = ny * w + nx;
          if (out.labels[n] == 0 && img.data[n] > threshold) {
            out.labels[n] = label;
            stack.push_back(n);
          }
        }
      }
    }
    areas.push_back(area);
  }
  // Relabel by descending area; discovery order breaks ties.
  std::vector<std::int32_t> order(areas.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::int32_t a, std::int32_t b) { return areas[a] > areas[b]; });
  std::vector<std::int32_t> remap(areas.size() + 1, 0);
  for (std::size_t rank = 0; rank < order.size(); ++rank)
    remap[order[rank] + 1] = static_cast<std::int32_t>(rank + 1);
  for (auto& l : out.labels) l = remap[l];
  out.count = static_cast<int>(areas.size());
  return out;
}

std::vector<PixelRect> component_bounds(const LabelImage& labels) {
  std::vector<std::array<int, 4>> ext(labels.count, {labels.width, labels.height, -1, -1});
  for (int y = 0; y < labels.height; ++y) {
    for (int x = 0; x < labels.width; ++x) {
      const int l = labels.at(x, y);
      if (l == 0) continue;
      auto& e = ext[l - 1];
      e[0] = std::min(e[0], x);
      e[1] = std::min(e[1], y);
      e[2] = std::max(e[2], x);
      e[3] = std::max(e[3], y);
    }
  }
  std::vector<PixelRect> out;
  out.reserve(ext.size());
  for (const auto& e : ext) out.push_back({e[0], e[1], e[2] - e[0] + 1, e[3] - e[1] + 1});
  return out;
}

GrayImage crop(const GrayImage& img, const PixelRect& r) {
  if (r.w <= 0 || r.h <= 0 || r.x < 0 || r.y < 0 || r.x + r.w > img.width ||
      r.y + r.h > img.height)
    throw Error(ErrorCode::Range, "crop rectangle outside image");
  GrayImage out(r.w, r.h);
  for (int y = 0; y < r.h; ++y)
    std::copy_n(&img.data[static_cast<std::size_t>(r.y + y) * img.width + r.x], r.w,
                &out.data[static_cast<std::size_t>(y) * r.w]);
  return out;
}

GrayImage flip_horizontal(const GrayImage& img) {
  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) out.at(x, y) = img.at(img.width - 1 - x, y);
  return out;
}

GrayImage transpose(const GrayImage& img) {
  GrayImage out(img.height, img.width);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) out.at(y, x) = img.at(x, y);
  return out;
}

GrayImage resize_bilinear(const GrayImage& img, int width, int height) {
  if (width <= 0 || height <= 0 || img.empty())
    throw Error(ErrorCode::Dimension, "resize to an empty image");
  if (width == img.width && height == img.height) return img;
  GrayImage out(width, height);
  const double sx = static_cast<double>(img.width) / width;
  const double sy = static_cast<double>(img.height) / height;
  for (int y = 0; y < height; ++y) {
    const double v = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height - 1.0);
    for (int x = 0; x < width; ++x) {
      const double u = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width - 1.0);
      out.at(x, y) = static_cast<float>(bilinear_sample(img, u, v));
    }
  }
  return out;
}

GrayImage invert(const GrayImage& img) {
  GrayImage out = img;
  for (auto& v : out.data) v = 1.0f - v;
  return out;
}

void paste(GrayImage& dst, const GrayImage& src, int x0, int y0) {
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) {
      const int dx = x0 + x, dy = y0 + y;
      if (dx >= 0 && dy >= 0 && dx < dst.width && dy < dst.height) dst.at(dx, dy) = src.at(x, y);
    }
}

GrayImage silhouette_from_drawing(const GrayImage& drawing, float ink_threshold) {
  const int w = drawing.width, h = drawing.height;
  std::vector<std::uint8_t> outside(drawing.data.size(), 0);
  std::vector<int> stack;
  auto seed = [&](int x, int y) {
    const int i = y * w + x;
    if (!outside[i] && drawing.data[i] >= ink_threshold) {
      outside[i] = 1;
      stack.push_back(i);
    }
  };
  for (int x = 0; x < w; ++x) { seed(x, 0); seed(x, h - 1); }
  for (int y = 0; y < h; ++y) { seed(0, y); seed(w - 1, y); }
  // 4-connected background so diagonal gaps in 8-connected ink do not leak.
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    const int x = i % w, y = i / w;
    if (x > 0) seed(x - 1, y);
    if (x + 1 < w) seed(x + 1, y);
    if (y > 0) seed(x, y - 1);
    if (y + 1 < h) seed(x, y + 1);
  }
  GrayImage out(w, h);
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = outside[i] ? 0.0f : 1.0f;
  return out;
}

}  // namespace vrecon::img
