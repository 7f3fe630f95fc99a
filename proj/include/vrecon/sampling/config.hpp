#pragma once

#include <cstdint>

namespace vrecon::sampling {

struct SamplerConfig {
  int n_samples = 22000;
  double surface_sigma = 0.01;
  double uniform_fraction = 0.10;
  double truncation = 0.10;
  int hull_resolution = 128;
  double thickness_angle_threshold = 120.0;  // degrees
  double edge_floor = 0.05;
  double hull_dist_normal_floor = 0.2;       // beta
  // Balancing constants the weighting needs but does not pin down.
  double dist_floor = 0.005;      // thickness distances below this are clamped
  double thickness_clip = 50.0;   // raw 1/d is clipped here, then divided by it
  double hull_dist_scale = 0.05;  // hull distance saturates at this fraction of the hull diagonal
  bool use_thickness = true;
  bool use_hull_distance = true;
  int scan_cameras = 18;
  int scan_resolution = 128;
  std::uint64_t seed = 0;

  void validate() const;  // throws Invalid
};

}  // namespace vrecon::sampling
