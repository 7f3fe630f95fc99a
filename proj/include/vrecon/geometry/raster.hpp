#pragma once

#include <cstdint>
#include <vector>

#include "vrecon/geometry/mesh.hpp"
#include "vrecon/geometry/ortho_view.hpp"
#include "vrecon/img/image.hpp"

namespace vrecon::geometry {

struct RenderResult {
  img::GrayImage depth;     // 1 where uncovered
  img::VectorImage normal;  // world-space, facing the camera; zero where uncovered
  img::GrayImage mask;      // 1 covered, 0 background
  std::vector<std::int32_t> triangle;  // covering triangle per pixel, -1 background
};

// Orthographic z-buffer rasterization sampled at pixel centres with a
// top-left fill rule. `skip` (optional, per triangle) excludes faces.
RenderResult render_view(const TriangleMesh& mesh, const OrthoView& view,
                         const std::vector<std::uint8_t>* skip = nullptr);

// Sobel magnitude of the normal image with covered normals extended into
// the background first, so silhouettes alone do not register as creases.
// Zero on uncovered pixels.
img::GrayImage crease_strength(const RenderResult& r);

}  // namespace vrecon::geometry
