#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "vrecon/core/vec3.hpp"
#include "vrecon/geometry/mesh.hpp"

namespace vrecon::recon {

// Node (i,j,k) sits at origin + spacing*(i,j,k); cubical cells.
struct ScalarGrid {
  int nx = 0, ny = 0, nz = 0;
  Vec3 origin;
  double spacing = 1.0;
  std::vector<float> values;

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * ny + j) * nx + i;
  }
  float at(int i, int j, int k) const { return values[index(i, j, k)]; }
  Vec3 node(int i, int j, int k) const { return origin + spacing * Vec3{double(i), double(j), double(k)}; }
};

// Lattice over `box` inflated by two cells, `res_x` cells along X and the
// other axes proportional so cells stay cubical.
ScalarGrid make_grid(const Aabb& box, int res_x);
// Fills every node with fn(position); parallel over z slabs.
void fill_grid(ScalarGrid& grid, const std::function<double(const Vec3&)>& fn);

// Iso-surface of the region where value > iso, outward winding, vertices
// shared across cells. Node values equal to iso count as inside. Throws
// Dimension for a grid with fewer than 2 nodes along an axis.
geometry::TriangleMesh marching_cubes(const ScalarGrid& grid, double iso);

// Connected pieces (through shared vertices), largest enclosed volume kept.
// Throws EmptyInput for an empty mesh.
geometry::TriangleMesh largest_component(const geometry::TriangleMesh& mesh);
int component_count(const geometry::TriangleMesh& mesh);

// "SGRD", u32 nx, ny, nz, f32 origin xyz, f32 spacing, f32 values.
std::vector<std::uint8_t> write_grid(const ScalarGrid& grid);
ScalarGrid read_grid(const std::vector<std::uint8_t>& bytes);

}  // namespace vrecon::recon
