#pragma once

#include <cstdint>

#include "vrecon/views/viewset.hpp"

namespace vrecon::views {

struct AugmentConfig {
  double noise_amplitude = 0.0;          // [0,1], uniform per-pixel noise
  double block_artifact_strength = 0.0;  // [0,1], blend toward 8x8 block means
  int extra_line_count = 0;              // random segments per view
  bool window_removal = false;           // use the interior drawing when present
  std::uint64_t seed = 0;

  void validate() const;  // throws Invalid
};

// Deterministic in cfg.seed; boxes and labels are never changed.
ViewSet augment(const ViewSet& views, const AugmentConfig& cfg);

// Single-image form. `line_mask`, when given, receives 1 where a line was drawn.
img::GrayImage augment_image(const img::GrayImage& image, const AugmentConfig& cfg,
                             std::uint64_t stream, img::GrayImage* line_mask = nullptr);

}  // namespace vrecon::views
