#include "vrecon/views/augment.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "vrecon/core/random.hpp"

namespace vrecon::views {

void AugmentConfig::validate() const {
  if (!(noise_amplitude >= 0 && noise_amplitude <= 1) ||
      !(block_artifact_strength >= 0 && block_artifact_strength <= 1) || extra_line_count < 0)
    throw Error(ErrorCode::Invalid, "augmentation parameters out of range");
}

img::GrayImage augment_image(const img::GrayImage& image, const AugmentConfig& cfg,
                             std::uint64_t stream, img::GrayImage* line_mask) {
  cfg.validate();
  img::GrayImage out = image;
  Rng rng(derive_seed(cfg.seed, stream));
  const int w = out.width, h = out.height;
  if (line_mask) *line_mask = img::GrayImage(w, h, 0.0f);

  if (cfg.block_artifact_strength > 0) {
    const float s = static_cast<float>(cfg.block_artifact_strength);
    for (int by = 0; by < h; by += 8)
      for (int bx = 0; bx < w; bx += 8) {
        const int ey = std::min(h, by + 8), ex = std::min(w, bx + 8);
        double sum = 0;
        for (int y = by; y < ey; ++y)
          for (int x = bx; x < ex; ++x) sum += out.at(x, y);
        const float mean = static_cast<float>(sum / ((ey - by) * (ex - bx)));
        for (int y = by; y < ey; ++y)
          for (int x = bx; x < ex; ++x) out.at(x, y) = (1 - s) * out.at(x, y) + s * mean;
      }
  }

  if (cfg.extra_line_count > 0 && w > 0 && h > 0) {
    // Line intensities follow the ink already present in the drawing.
    std::vector<float> ink;
    for (float v : image.data)
      if (v < 0.5f) ink.push_back(v);
    for (int l = 0; l < cfg.extra_line_count; ++l) {
      int x0 = static_cast<int>(uniform01(rng) * w), y0 = static_cast<int>(uniform01(rng) * h);
      const int x1 = static_cast<int>(uniform01(rng) * w), y1 = static_cast<int>(uniform01(rng) * h);
      const float value = ink.empty() ? 0.0f : ink[static_cast<std::size_t>(uniform01(rng) * ink.size())];
      // Bresenham
      const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
      const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
      int err = dx + dy;
      while (true) {
        out.at(x0, y0) = value;
        if (line_mask) line_mask->at(x0, y0) = 1.0f;
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) { err += dy; x0 += sx; }
        if (e2 <= dx) { err += dx; y0 += sy; }
      }
    }
  }

  if (cfg.noise_amplitude > 0) {
    const double a = cfg.noise_amplitude;
    for (auto& v : out.data)
      v = static_cast<float>(std::clamp(v + (2.0 * uniform01(rng) - 1.0) * a, 0.0, 1.0));
  }
  return out;
}

ViewSet augment(const ViewSet& views, const AugmentConfig& cfg) {
  cfg.validate();
  ViewSet out = views;
  for (std::size_t i = 0; i < out.views.size(); ++i) {
    auto& v = out.views[i];
    const img::GrayImage& base = (cfg.window_removal && v.interior) ? *v.interior : v.image;
    v.image = augment_image(base, cfg, i);
  }
  return out;
}

}  // namespace vrecon::views
