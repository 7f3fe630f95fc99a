#include "vrecon/views/synth.hpp"

#include <algorithm>
#include <cmath>

#include "vrecon/geometry/raster.hpp"
#include "vrecon/img/ops.hpp"

namespace vrecon::views {

img::GrayImage line_drawing(const geometry::TriangleMesh& mesh, const geometry::OrthoView& view,
                            double depth_jump, const std::vector<std::uint8_t>* skip,
                            img::GrayImage* mask_out) {
  const auto r = geometry::render_view(mesh, view, skip);
  const int w = view.width, h = view.height;
  const img::GrayImage crease = geometry::crease_strength(r);
  img::GrayImage out(w, h, 1.0f);
  auto covered = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < w && y < h && r.mask.at(x, y) > 0.5f;
  };
  auto group_of = [&](int x, int y) -> std::int32_t {
    const std::int32_t t = r.triangle[static_cast<std::size_t>(y) * w + x];
    return mesh.has_groups() ? mesh.face_groups[static_cast<std::size_t>(t)] : 0;
  };
  constexpr int dx4[4] = {1, -1, 0, 0}, dy4[4] = {0, 0, 1, -1};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!covered(x, y)) continue;
      float line = crease.at(x, y);
      float part = 0.0f;
      for (int k = 0; k < 4; ++k) {
        const int xx = x + dx4[k], yy = y + dy4[k];
        if (!covered(xx, yy)) { line = 1.0f; continue; }
        // the nearer side of an occlusion carries the line
        if (r.depth.at(xx, yy) - r.depth.at(x, y) > depth_jump) line = 1.0f;
        if (group_of(xx, yy) != group_of(x, y)) part = 1.0f;
      }
      out.at(x, y) = (1.0f - line) * (1.0f - part);
    }
  if (mask_out) *mask_out = r.mask;
  return out;
}

SynthBlueprint synth_blueprint(const geometry::TriangleMesh& mesh, const SynthConfig& cfg) {
  if (mesh.empty()) throw Error(ErrorCode::EmptyInput, "cannot draw an empty mesh");
  if (cfg.resolution < 4 || cfg.gap < 0) throw Error(ErrorCode::Invalid, "bad synth configuration");
  const Aabb box = mesh.bounds();
  const double ppu = cfg.resolution / std::max(1e-12, box.extent().x);

  std::vector<std::uint8_t> glass(mesh.triangles.size(), 0);
  bool any_glass = false;
  if (mesh.has_groups())
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      const auto& name = mesh.group_names[static_cast<std::size_t>(mesh.face_groups[t])];
      if (name.find("glass") != std::string::npos) glass[t] = any_glass = 1;
    }

  SynthBlueprint out;
  const Kind order[4] = {Kind::Side, Kind::Top, Kind::Front, Kind::Back};
  std::vector<img::GrayImage> interiors;
  for (Kind k : order) {
    const auto view = geometry::canonical_view(to_view_kind(k), box, ppu);
    ViewEntry e;
    img::GrayImage mask;
    e.image = line_drawing(mesh, view, cfg.depth_jump, nullptr, &mask);
    e.mask = std::move(mask);
    if (any_glass) e.interior = line_drawing(mesh, view, cfg.depth_jump, &glass);
    e.label = {k, Facing::PositiveAxis};
    out.views.views.push_back(std::move(e));
  }
  auto& vs = out.views.views;
  const int g = cfg.gap;
  const int left_w = std::max(vs[0].image.width, vs[1].image.width);
  const int right_w = std::max(vs[2].image.width, vs[3].image.width);
  const int left_h = vs[0].image.height + g + vs[1].image.height;
  const int right_h = vs[2].image.height + g + vs[3].image.height;
  const int W = g + left_w + g + right_w + g, H = g + std::max(left_h, right_h) + g;
  vs[0].box = {g, g, vs[0].image.width, vs[0].image.height};
  vs[1].box = {g, g + vs[0].image.height + g, vs[1].image.width, vs[1].image.height};
  vs[2].box = {g + left_w + g, g, vs[2].image.width, vs[2].image.height};
  vs[3].box = {g + left_w + g, g + vs[2].image.height + g, vs[3].image.width, vs[3].image.height};

  out.sheet = img::GrayImage(W, H, 1.0f);
  for (const auto& v : vs) img::paste(out.sheet, v.image, v.box.x, v.box.y);
  if (any_glass) {
    out.interior_sheet = img::GrayImage(W, H, 1.0f);
    for (const auto& v : vs) img::paste(*out.interior_sheet, *v.interior, v.box.x, v.box.y);
  }
  out.views.source_width = W;
  out.views.source_height = H;
  return out;
}

Aabb blueprint_frame(const ViewSet& set) {
  const auto& side = set.get(Kind::Side);
  const auto& front = set.get(Kind::Front);
  const double s = side.image.width;
  if (s <= 0 || front.image.width <= 0 || side.image.height <= 0)
    throw Error(ErrorCode::Dimension, "view images must be non-empty");
  const double hy = front.image.width / (2 * s), hz = side.image.height / (2 * s);
  return {{-0.5, -hy, -hz}, {0.5, hy, hz}};
}

geometry::OrthoView view_camera(const ViewSet& set, Kind kind, const Aabb& frame) {
  const auto& v = set.get(kind);
  return geometry::canonical_view_sized(to_view_kind(kind), frame, v.image.width, v.image.height);
}

}  // namespace vrecon::views
