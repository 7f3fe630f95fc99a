#pragma once

#include <functional>
#include <vector>

#include "vrecon/geometry/mesh.hpp"
#include "vrecon/recon/grid.hpp"

namespace vrecon::recon {

// Test and demo shapes. All are closed and wound outward.

geometry::TriangleMesh box_mesh(const Vec3& lo, const Vec3& hi);
// Axis-aligned cube of edge `size` centred at the origin, each face split
// into n x n quads. With `split_groups`, faces are tagged "front" (x > 0)
// and "rear"; n must then be even so the split falls on mesh edges.
geometry::TriangleMesh cube_mesh(double size = 1.0, int n = 2, bool split_groups = false);
geometry::TriangleMesh icosphere(double radius, int subdivisions);
geometry::TriangleMesh torus(double major, double minor, int nu, int nv);

using SdfFn = std::function<double(const Vec3&)>;

double box_sdf(const Vec3& p, const Vec3& lo, const Vec3& hi);
// Iso-surface of an analytic signed distance over `box`, `res` cells along X.
geometry::TriangleMesh mesh_from_sdf(const SdfFn& sdf, const Aabb& box, int res);

// Body, cabin and a thin rear wing; length 1 along X, wider than tall,
// centred on the origin (normalized).
double car_proxy_sdf(const Vec3& p);
geometry::TriangleMesh car_proxy(int res = 160);

// A box with a closed pocket dug into its top face, invisible to silhouettes.
double pocket_box_sdf(const Vec3& p);
geometry::TriangleMesh pocket_box(int res = 120);

// Cube [-0.25, 0.25]^3 with a fin of thickness `t` standing on its top,
// built as two overlapping boxes (not a manifold union).
struct FinCube {
  geometry::TriangleMesh mesh;
  double cube_top = 0.25;
  double fin_area = 0.0;    // exposed fin area
  double total_area = 0.0;  // exposed area of the whole shape
};
FinCube fin_cube(double t = 0.01, double fin_height = 0.2);

// Truncated-SDF grid of a body with a rear wing held above it by a strut
// whose value is 0.47 throughout: at iso 0.5 the wing floats free, at 0.45
// the strut joins it to the body.
ScalarGrid detached_wing_grid(int res = 64);

}  // namespace vrecon::recon
