#include "vrecon/sampling/config.hpp"

#include "vrecon/core/error.hpp"

namespace vrecon::sampling {

void SamplerConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::Invalid, std::string("sampler: ") + what); };
  if (n_samples < 1) fail("n_samples must be positive");
  if (!(surface_sigma > 0)) fail("surface_sigma must be positive");
  if (!(uniform_fraction >= 0 && uniform_fraction < 1)) fail("uniform_fraction must lie in [0,1)");
  if (!(truncation > 0)) fail("truncation must be positive");
  if (hull_resolution < 2) fail("hull_resolution must be at least 2");
  if (!(thickness_angle_threshold > 0 && thickness_angle_threshold <= 180))
    fail("thickness_angle_threshold must lie in (0,180]");
  if (!(edge_floor >= 0 && edge_floor <= 1)) fail("edge_floor must lie in [0,1]");
  if (!(hull_dist_normal_floor >= 0 && hull_dist_normal_floor <= 1))
    fail("hull_dist_normal_floor must lie in [0,1]");
  if (!(dist_floor > 0) || !(thickness_clip > 0) || !(hull_dist_scale > 0))
    fail("dist_floor, thickness_clip and hull_dist_scale must be positive");
  if (scan_cameras < 6) fail("scan_cameras must be at least 6");
  if (scan_resolution < 8) fail("scan_resolution must be at least 8");
}

}  // namespace vrecon::sampling
