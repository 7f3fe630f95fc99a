#pragma once

#include <memory>
#include <vector>

#include "vrecon/geometry/kdtree.hpp"
#include "vrecon/geometry/mesh.hpp"
#include "vrecon/geometry/ortho_view.hpp"
#include "vrecon/img/image.hpp"

namespace vrecon::sampling {

struct ScanCamera {
  geometry::OrthoView view;
  img::GrayImage depth;  // 1 where uncovered
  img::GrayImage mask;
};

// Oriented surface points seen by a ring of orthographic cameras.
struct SurfaceScan {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;  // unit, facing the camera that saw the point
  std::vector<float> edge;    // [0,1]
  std::vector<float> rel_height;  // [0,1] over the mesh's Z extent
  std::vector<std::uint16_t> camera;  // which camera produced each point
  std::vector<ScanCamera> cameras;
  std::shared_ptr<const geometry::KdTree> tree;
  double spacing = 0.0;  // world size of one scan pixel

  std::size_t size() const { return points.size(); }
};

// Unit directions from the camera towards the model: the six axes first, then
// icosahedron vertices, then a Fibonacci spiral for anything beyond 18.
std::vector<Vec3> camera_directions(int n_cams);

// Throws Invalid for n_cams < 6 and EmptyInput for an empty mesh.
SurfaceScan scan_mesh(const geometry::TriangleMesh& mesh, int n_cams = 18, int resolution = 128);

// Distance to the nearest scan point, negative when no camera sees `p`.
double signed_distance(const SurfaceScan& scan, const Vec3& p);
// Sign part only: true when some camera has an unobstructed view of `p`.
bool seen_from_outside(const SurfaceScan& scan, const Vec3& p);

}  // namespace vrecon::sampling
