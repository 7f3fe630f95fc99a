#include "vrecon/field/field.hpp"

#include <algorithm>
#include <cmath>

#include "vrecon/core/parallel.hpp"
#include "vrecon/img/ops.hpp"
#include "vrecon/views/synth.hpp"

namespace vrecon::field {

geometry::OrthoView ViewInputs::camera(int view) const {
  const auto kind = views::to_view_kind(views::kCanonicalOrder[static_cast<std::size_t>(view)]);
  const auto& im = images[static_cast<std::size_t>(view)];
  return geometry::canonical_view_sized(kind, frame, im.width, im.height);
}

ViewInputs prepare_inputs(const views::ViewSet& set, const EncoderConfig& enc) {
  if (!set.finalized())
    throw Error(ErrorCode::UnresolvedViews, "views must be labelled front/back/side/top with facing set");
  ViewInputs in;
  in.frame = views::blueprint_frame(set);
  int largest = 0;
  for (int v = 0; v < 4; ++v) {
    in.images[static_cast<std::size_t>(v)] = views::oriented_image(set, views::kCanonicalOrder[static_cast<std::size_t>(v)]);
    const auto& im = in.images[static_cast<std::size_t>(v)];
    largest = std::max({largest, im.width, im.height});
  }
  const double ratio = static_cast<double>(largest) / enc.max_input_dim;
  if (ratio < 0.8 - 1e-12 || ratio > 1.2 + 1e-12)
    throw Error(ErrorCode::SizeMismatch,
                "largest view side is " + std::to_string(largest) + " px; the network expects " +
                    std::to_string(enc.max_input_dim) + " px and accepts 20% either way. Rescale the blueprint to roughly " +
                    std::to_string(enc.max_input_dim) + " px along the car's length");
  if (largest != enc.max_input_dim) {
    for (auto& im : in.images) {
      const int w = std::max(1, static_cast<int>(std::lround(im.width / ratio)));
      const int h = std::max(1, static_cast<int>(std::lround(im.height / ratio)));
      im = img::resize_bilinear(im, w, h);
    }
  }
  for (const auto& im : in.images)
    if (im.width < enc.min_input_dim() || im.height < enc.min_input_dim())
      throw Error(ErrorCode::Dimension, "a view is smaller than the encoder minimum of " +
                                            std::to_string(enc.min_input_dim()) + " px");
  return in;
}

std::size_t feature_elements(const EncoderConfig& enc, const std::vector<std::array<int, 2>>& sizes) {
  std::size_t total = 0;
  for (const auto& s : sizes) {
    std::size_t w = static_cast<std::size_t>(s[0]), h = static_cast<std::size_t>(s[1]);
    for (int i = 0; i < enc.initial_downsample_steps; ++i) {
      w = (w + 1) / 2;
      h = (h + 1) / 2;
    }
    total += static_cast<std::size_t>(enc.feature_depth) * w * h;
  }
  return total;
}

PixelAlignedField build_field(const ParamSet& params, ViewInputs inputs) {
  PixelAlignedField f;
  f.params = params;
  f.layout = make_layout(params.config);
  f.inputs = std::move(inputs);
  for (int v = 0; v < 4; ++v) {
    Tape<float> tape(f.params.tensors, nullptr);
    const int in = tape.input(encoder_input<float>(f.inputs.images[static_cast<std::size_t>(v)]));
    const int out = encode(tape, f.layout, params.config.encoder, v, in);
    f.features[static_cast<std::size_t>(v)] = tape.value(out);
  }
  return f;
}

std::vector<float> field_input(const PixelAlignedField& f, const Vec3& p) {
  const int c = f.params.config.encoder.feature_depth;
  const int s = f.params.config.encoder.downsample_factor();
  std::vector<float> x(static_cast<std::size_t>(4 * c + 3));
  for (int v = 0; v < 4; ++v) {
    const auto q = f.inputs.camera(v).project(p);
    sample_features(f.features[static_cast<std::size_t>(v)], feature_coord(q.u, s), feature_coord(q.v, s),
                    x.data() + static_cast<std::size_t>(v) * c);
  }
  x[static_cast<std::size_t>(4 * c)] = static_cast<float>(p.x);
  x[static_cast<std::size_t>(4 * c + 1)] = static_cast<float>(p.y);
  x[static_cast<std::size_t>(4 * c + 2)] = static_cast<float>(p.z);
  return x;
}

Prediction<float> query(const PixelAlignedField& f, const Vec3& p) { return query_batch(f, {p}).front(); }

std::vector<Prediction<float>> query_batch(const PixelAlignedField& f, const std::vector<Vec3>& points) {
  constexpr std::size_t kChunk = 1024;
  const std::size_t din = static_cast<std::size_t>(f.layout.mlp_input());
  std::vector<Prediction<float>> out(points.size());
  const std::size_t chunks = (points.size() + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t lo = c * kChunk, hi = std::min(points.size(), lo + kChunk);
    std::vector<float> x((hi - lo) * din);
    for (std::size_t i = lo; i < hi; ++i) {
      const auto row = field_input(f, points[i]);
      std::copy(row.begin(), row.end(), x.begin() + static_cast<std::ptrdiff_t>((i - lo) * din));
    }
    std::vector<std::vector<float>> acts;
    mlp_forward(f.params.tensors, f.layout, x, static_cast<int>(hi - lo), acts);
    for (std::size_t i = lo; i < hi; ++i) out[i] = apply_heads(acts.back().data() + (i - lo) * 5);
  });
  return out;
}

}  // namespace vrecon::field
