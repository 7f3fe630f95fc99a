#pragma once

#include <optional>

#include "vrecon/geometry/mesh.hpp"
#include "vrecon/views/viewset.hpp"

namespace vrecon::views {

struct SynthConfig {
  int resolution = 64;   // pixels along the model's X extent
  int gap = 16;          // between views and around the sheet
  double depth_jump = 0.05;  // depth01 difference drawn as an occlusion line
};

struct SynthBlueprint {
  ViewSet views;                  // finalized, masks attached, facing positive
  img::GrayImage sheet;           // assembled blueprint
  std::optional<img::GrayImage> interior_sheet;  // same layout, glass removed
};

// Layout: side above top in the left column, front above back on the right.
// The mesh is expected normalized; throws EmptyInput for an empty mesh.
SynthBlueprint synth_blueprint(const geometry::TriangleMesh& mesh, const SynthConfig& cfg = {});

// Line drawing of one rendered view: dark lines on white, lines only on
// covered pixels so the ink box equals the silhouette box.
img::GrayImage line_drawing(const geometry::TriangleMesh& mesh, const geometry::OrthoView& view,
                            double depth_jump, const std::vector<std::uint8_t>* skip,
                            img::GrayImage* mask_out = nullptr);

// World box spanned by a finalized view set: X in [-0.5, 0.5], the other
// extents scaled by the side view's pixels per unit.
Aabb blueprint_frame(const ViewSet& set);

// Pixel grid the field and hull use for `kind` inside `frame`.
geometry::OrthoView view_camera(const ViewSet& set, Kind kind, const Aabb& frame);

}  // namespace vrecon::views
