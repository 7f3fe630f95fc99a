#include "vrecon/recon/reconstruct.hpp"

#include <string>

#include "vrecon/core/error.hpp"
#include "vrecon/views/synth.hpp"

namespace vrecon::recon {

void ReconstructConfig::validate() const {
  if (resolution < 2) throw Error(ErrorCode::Invalid, "reconstruct.resolution must be at least 2");
  if (!(iso > 0 && iso < 1)) throw Error(ErrorCode::Invalid, "reconstruct.iso must be in (0,1)");
}

ScalarGrid evaluate_grid(const field::PixelAlignedField& f, const Aabb& box, const ReconstructConfig& cfg) {
  cfg.validate();
  ScalarGrid g = make_grid(box, cfg.resolution);
  // one z slab per batch keeps the point list small
  std::vector<Vec3> pts(static_cast<std::size_t>(g.nx) * g.ny);
  for (int k = 0; k < g.nz; ++k) {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) pts[static_cast<std::size_t>(j) * g.nx + i] = g.node(i, j, k);
    const auto pred = field::query_batch(f, pts);
    for (std::size_t n = 0; n < pts.size(); ++n) g.values[g.index(0, 0, k) + n] = static_cast<float>(pred[n].value);
  }
  // outer shell forced outside: the surface always closes inside the grid
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (i == 0 || j == 0 || k == 0 || i == g.nx - 1 || j == g.ny - 1 || k == g.nz - 1) g.values[g.index(i, j, k)] = 0.0f;
  return g;
}

geometry::TriangleMesh extract(const ScalarGrid& grid, const ReconstructConfig& cfg) {
  cfg.validate();
  auto mesh = marching_cubes(grid, cfg.iso);
  if (cfg.keep_largest && !mesh.triangles.empty()) mesh = largest_component(mesh);
  return mesh;
}

geometry::TriangleMesh reconstruct(const views::ViewSet& set, const field::ParamSet& params,
                                   const ReconstructConfig& cfg, ScalarGrid* grid_out) {
  cfg.validate();
  auto inputs = field::prepare_inputs(set, params.config.encoder);
  const Aabb frame = inputs.frame;
  const auto f = field::build_field(params, std::move(inputs));
  auto grid = evaluate_grid(f, frame, cfg);
  auto mesh = extract(grid, cfg);
  if (grid_out) *grid_out = std::move(grid);
  return mesh;
}

}  // namespace vrecon::recon
