#pragma once

#include "vrecon/field/field.hpp"
#include "vrecon/recon/grid.hpp"

namespace vrecon::recon {

struct ReconstructConfig {
  int resolution = 256;  // cells along X; Y and Z follow the box
  double iso = 0.5;
  bool keep_largest = true;
  void validate() const;  // throws Invalid
};

// Field value at every node of make_grid(box, cfg.resolution), except the
// outermost node layer which is set to 0.
ScalarGrid evaluate_grid(const field::PixelAlignedField& f, const Aabb& box, const ReconstructConfig& cfg);

// Iso-surface of an evaluated grid, optionally reduced to its largest piece.
// An empty extraction stays empty.
geometry::TriangleMesh extract(const ScalarGrid& grid, const ReconstructConfig& cfg);

// Resize, encode, evaluate over the views' frame and extract.
geometry::TriangleMesh reconstruct(const views::ViewSet& set, const field::ParamSet& params,
                                   const ReconstructConfig& cfg, ScalarGrid* grid_out = nullptr);

}  // namespace vrecon::recon
