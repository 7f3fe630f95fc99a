#include "vrecon/geometry/mesh.hpp"

#include <cmath>
#include <map>

#include "vrecon/core/error.hpp"

namespace vrecon::geometry {

Aabb TriangleMesh::bounds() const {
  Aabb box;
  for (const auto& v : vertices) box.extend(v);
  return box;
}

void TriangleMesh::validate() const {
  for (const auto& v : vertices)
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z))
      throw Error(ErrorCode::Invalid, "mesh has non-finite vertex coordinates");
  for (const auto& t : triangles)
    for (auto i : t)
      if (i >= vertices.size()) throw Error(ErrorCode::Invalid, "triangle index out of range");
  if (!face_groups.empty()) {
    if (face_groups.size() != triangles.size())
      throw Error(ErrorCode::Invalid, "face group count does not match triangle count");
    for (auto g : face_groups)
      if (g < 0 || static_cast<std::size_t>(g) >= group_names.size())
        throw Error(ErrorCode::Invalid, "face group index out of range");
  }
}

Vec3 triangle_normal(const TriangleMesh& mesh, std::size_t tri) {
  const auto& t = mesh.triangles[tri];
  const Vec3& a = mesh.vertices[t[0]];
  return normalized(cross(mesh.vertices[t[1]] - a, mesh.vertices[t[2]] - a));
}

double triangle_area(const TriangleMesh& mesh, std::size_t tri) {
  const auto& t = mesh.triangles[tri];
  const Vec3& a = mesh.vertices[t[0]];
  return 0.5 * norm(cross(mesh.vertices[t[1]] - a, mesh.vertices[t[2]] - a));
}

double surface_area(const TriangleMesh& mesh) {
  double area = 0.0;
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) area += triangle_area(mesh, i);
  return area;
}

double signed_volume(const TriangleMesh& mesh) {
  double vol = 0.0;
  for (const auto& t : mesh.triangles)
    vol += dot(mesh.vertices[t[0]], cross(mesh.vertices[t[1]], mesh.vertices[t[2]]));
  return vol / 6.0;
}

void append(TriangleMesh& mesh, const TriangleMesh& other) {
  const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
  const bool groups = mesh.has_groups() || other.has_groups();
  if (groups && mesh.face_groups.empty() && !mesh.triangles.empty()) {
    mesh.group_names.push_back("default");
    mesh.face_groups.assign(mesh.triangles.size(),
                            static_cast<std::int32_t>(mesh.group_names.size() - 1));
  }
  mesh.vertices.insert(mesh.vertices.end(), other.vertices.begin(), other.vertices.end());
  for (const auto& t : other.triangles) mesh.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
  if (!groups) return;
  auto group_id = [&](const std::string& name) {
    for (std::size_t i = 0; i < mesh.group_names.size(); ++i)
      if (mesh.group_names[i] == name) return static_cast<std::int32_t>(i);
    mesh.group_names.push_back(name);
    return static_cast<std::int32_t>(mesh.group_names.size() - 1);
  };
  if (other.has_groups()) {
    for (auto g : other.face_groups) mesh.face_groups.push_back(group_id(other.group_names[g]));
  } else {
    const auto g = group_id("default");
    mesh.face_groups.insert(mesh.face_groups.end(), other.triangles.size(), g);
  }
}

NormalizedMesh normalize_mesh(const TriangleMesh& mesh) {
  if (mesh.vertices.empty() || mesh.triangles.empty())
    throw Error(ErrorCode::DegenerateMesh, "cannot normalize an empty mesh");
  const Aabb box = mesh.bounds();
  const double length = box.extent().x;
  if (!(length > 0.0)) throw Error(ErrorCode::DegenerateMesh, "mesh has zero extent along X");
  const Similarity t{1.0 / length, box.center()};
  return {transformed(mesh, t), t};
}

TriangleMesh transformed(const TriangleMesh& mesh, const Similarity& t) {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v = t.apply(v);
  return out;
}

}  // namespace vrecon::geometry
