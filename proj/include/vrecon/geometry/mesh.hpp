#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vrecon/core/vec3.hpp"

namespace vrecon::geometry {

using Triangle = std::array<std::uint32_t, 3>;

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  // Either empty or one entry per triangle, indexing group_names.
  std::vector<std::int32_t> face_groups;
  std::vector<std::string> group_names;

  bool empty() const { return triangles.empty(); }
  bool has_groups() const { return !face_groups.empty(); }
  Aabb bounds() const;
  // Throws Invalid if indices are out of range or coordinates non-finite.
  void validate() const;
};

Vec3 triangle_normal(const TriangleMesh& mesh, std::size_t tri);  // unit, by winding
double triangle_area(const TriangleMesh& mesh, std::size_t tri);
double surface_area(const TriangleMesh& mesh);
// Divergence-theorem volume; positive for outward winding.
double signed_volume(const TriangleMesh& mesh);

// Appends `other` (indices shifted, groups merged by name).
void append(TriangleMesh& mesh, const TriangleMesh& other);

// p' = scale * (p - center)
struct Similarity {
  double scale = 1.0;
  Vec3 center{};

  Vec3 apply(const Vec3& p) const { return scale * (p - center); }
  Vec3 invert(const Vec3& p) const { return p / scale + center; }
};

struct NormalizedMesh {
  TriangleMesh mesh;
  Similarity transform;
};

// Uniform scale so the X extent is exactly 1 and the bounding-box centre is the
// origin. Throws DegenerateMesh for an empty mesh or zero X extent.
NormalizedMesh normalize_mesh(const TriangleMesh& mesh);
TriangleMesh transformed(const TriangleMesh& mesh, const Similarity& t);

}  // namespace vrecon::geometry
