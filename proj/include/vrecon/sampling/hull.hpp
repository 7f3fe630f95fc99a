#pragma once

#include <cstdint>
#include <vector>

#include "vrecon/core/vec3.hpp"
#include "vrecon/views/viewset.hpp"

namespace vrecon::sampling {

// Cubical voxels; voxel (i,j,k) has its centre at origin + spacing*(i,j,k).
struct VoxelGrid {
  int nx = 0, ny = 0, nz = 0;
  Vec3 origin;
  double spacing = 1.0;
  std::vector<std::uint8_t> occupied;

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * ny + j) * nx + i;
  }
  Vec3 center(int i, int j, int k) const { return origin + spacing * Vec3{double(i), double(j), double(k)}; }
  bool at(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < nx && j < ny && k < nz && occupied[index(i, j, k)];
  }
  std::size_t count() const;
  // Occupied voxels with an empty 6-neighbour, as centre points.
  std::vector<Vec3> boundary_points() const;
  Aabb occupied_bounds() const;
};

// A voxel is kept when its centre lands inside every view's silhouette. The
// grid covers the blueprint frame plus two voxels, `res` voxels along X.
// Uses masks when present, otherwise fills the drawings. Throws EmptyHull.
VoxelGrid visual_hull(const views::ViewSet& set, int res);

}  // namespace vrecon::sampling
