#pragma once

#include <vector>

#include "vrecon/sampling/config.hpp"
#include "vrecon/sampling/hull.hpp"
#include "vrecon/sampling/scan.hpp"

namespace vrecon::sampling {

struct SampleWeights {
  std::vector<double> edge, normal, hull_dist, hull_dist_normal, thickness;
  std::vector<double> weight;  // sums to 1
};

// 1 near the ground, above half height or on faces not pointing down;
// otherwise the relative height itself.
double w_normal(double rel_height, double normal_down);

// Per point: over each axis, the nearest point on the opposite side of that
// axis whose normal differs by more than the threshold angle contributes
// 1/max(d, dist_floor); the maximum is clipped and scaled to [0,1].
std::vector<double> thickness_weights(const SurfaceScan& scan, const SamplerConfig& cfg);

// Throws ZeroWeights when nothing can be normalized.
SampleWeights compute_weights(const SurfaceScan& scan, const VoxelGrid& hull, const SamplerConfig& cfg);

}  // namespace vrecon::sampling
