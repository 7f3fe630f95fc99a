#pragma once

#include <cstdint>
#include <vector>

#include "vrecon/geometry/mesh.hpp"

namespace vrecon::recon {

struct Metrics {
  double iou = 0.0;
  double chamfer = 0.0;
};

// Area-weighted uniform surface points.
std::vector<Vec3> sample_surface(const geometry::TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

// Volumetric IoU by ray parity on a lattice with `res` cells along the
// longest axis of the joint bounding box; Chamfer is the mean of the two
// directed mean nearest distances between `n` surface points per mesh.
Metrics eval_metrics(const geometry::TriangleMesh& recon, const geometry::TriangleMesh& truth,
                     std::size_t n = 20000, int res = 128, std::uint64_t seed = 0);

}  // namespace vrecon::recon
