#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vrecon/geometry/mesh.hpp"
#include "vrecon/sampling/config.hpp"
#include "vrecon/sampling/scan.hpp"
#include "vrecon/sampling/weights.hpp"

namespace vrecon::sampling {

struct SampleRecord {
  std::array<float, 3> position{};
  float sdf = 0.0f;
  std::array<float, 3> normal{};
  float edge = 0.0f;
  float value = 0.0f;
  bool surface = false;
  bool operator==(const SampleRecord&) const = default;
};

struct SampleSet {
  std::vector<SampleRecord> records;
  bool operator==(const SampleSet&) const = default;
};

// 0.5 on the surface, 1 at tau inside and beyond, 0 at tau outside.
double tsdf_map(double sdf, double tau);

// Scan indices of the surface samples, drawn with replacement from `weight`.
std::vector<std::uint32_t> draw_indices(const std::vector<double>& weight, std::size_t count,
                                        std::uint64_t seed);

SampleSet draw_samples(const geometry::TriangleMesh& mesh, const SurfaceScan& scan,
                       const SampleWeights& weights, const SamplerConfig& cfg);

std::vector<std::uint8_t> write_samples(const SampleSet& set);
SampleSet read_samples(const std::vector<std::uint8_t>& bytes);  // throws DecodeError

// ASCII point cloud coloured by weight, for inspecting where samples go.
std::string weights_ply(const SurfaceScan& scan, const std::vector<double>& weight);

}  // namespace vrecon::sampling
