#pragma once

#include <vector>

#include "vrecon/geometry/mesh.hpp"

namespace vrecon::geometry {

// Odd number of ray crossings means inside. Hits that graze an edge or vertex
// are retried with a deterministically perturbed direction. Only meaningful
// for watertight meshes.
bool ray_parity_inside(const TriangleMesh& mesh, const Vec3& p, const Vec3& direction = {1, 0, 0});

// Same rule for many points sharing (y, z) columns: triangles are binned in
// the YZ plane and each column is intersected once along +X.
class ParityScanner {
 public:
  explicit ParityScanner(const TriangleMesh& mesh, int bins = 64);

  // Sorted X coordinates where the column line at (y, z) crosses the surface.
  std::vector<double> crossings(double y, double z) const;
  bool inside(const Vec3& p) const;

 private:
  const TriangleMesh& mesh_;
  Aabb box_;
  int bins_;
  std::vector<std::vector<std::uint32_t>> cells_;
};

}  // namespace vrecon::geometry
