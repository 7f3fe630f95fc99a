#pragma once

#include <array>
#include <vector>

#include "vrecon/field/network.hpp"
#include "vrecon/geometry/ortho_view.hpp"
#include "vrecon/views/viewset.hpp"

namespace vrecon::field {

// Network-ready views: canonical orientation, order front/back/side/top.
struct ViewInputs {
  std::array<img::GrayImage, 4> images;
  Aabb frame;  // world box the views span
  geometry::OrthoView camera(int view) const;
};

// Views whose largest side is within +-20% of max_input_dim are all rescaled
// by the one factor that brings it to exactly max_input_dim. Throws
// UnresolvedViews for a non-finalized set and SizeMismatch outside the band.
ViewInputs prepare_inputs(const views::ViewSet& set, const EncoderConfig& enc);

// Feature-map element count for views of the given (width, height).
std::size_t feature_elements(const EncoderConfig& enc, const std::vector<std::array<int, 2>>& sizes);

struct PixelAlignedField {
  ParamSet params;
  Layout layout;
  ViewInputs inputs;
  std::array<Tensor<float>, 4> features;
};

PixelAlignedField build_field(const ParamSet& params, ViewInputs inputs);

// Concatenated per-view features followed by the world coordinate.
std::vector<float> field_input(const PixelAlignedField& f, const Vec3& p);
Prediction<float> query(const PixelAlignedField& f, const Vec3& p);
std::vector<Prediction<float>> query_batch(const PixelAlignedField& f, const std::vector<Vec3>& points);

}  // namespace vrecon::field
