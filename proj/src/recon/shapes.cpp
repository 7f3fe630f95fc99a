#include "vrecon/recon/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "vrecon/recon/grid.hpp"
#include "vrecon/sampling/samples.hpp"

namespace vrecon::recon {

using geometry::TriangleMesh;

TriangleMesh box_mesh(const Vec3& lo, const Vec3& hi) {
  TriangleMesh m;
  for (int c = 0; c < 8; ++c)
    m.vertices.push_back({(c & 1) ? hi.x : lo.x, (c & 2) ? hi.y : lo.y, (c & 4) ? hi.z : lo.z});
  // outward quads, counter-clockwise from outside
  const int quads[6][4] = {{0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6}};
  for (const auto& q : quads) {
    m.triangles.push_back({std::uint32_t(q[0]), std::uint32_t(q[1]), std::uint32_t(q[2])});
    m.triangles.push_back({std::uint32_t(q[0]), std::uint32_t(q[2]), std::uint32_t(q[3])});
  }
  return m;
}

TriangleMesh cube_mesh(double size, int n, bool split_groups) {
  if (n < 1 || (split_groups && n % 2)) throw Error(ErrorCode::Invalid, "bad cube subdivision");
  TriangleMesh m;
  std::map<std::array<int, 3>, std::uint32_t> index;
  auto vert = [&](int a, int b, int c) {
    auto [it, fresh] = index.try_emplace({a, b, c}, static_cast<std::uint32_t>(m.vertices.size()));
    if (fresh) m.vertices.push_back(size * Vec3{double(a) / n - 0.5, double(b) / n - 0.5, double(c) / n - 0.5});
    return it->second;
  };
  if (split_groups) m.group_names = {"rear", "front"};
  // each face: fixed axis f at level 0 or n; (u, v) chosen so u x v is outward
  for (int axis = 0; axis < 3; ++axis)
    for (int side = 0; side < 2; ++side) {
      const int ua = (axis + 1) % 3, va = (axis + 2) % 3;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          std::array<std::uint32_t, 4> q;
          const int uv[4][2] = {{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}};
          for (int c = 0; c < 4; ++c) {
            std::array<int, 3> g{};
            g[axis] = side * n;
            g[ua] = uv[c][0];
            g[va] = uv[c][1];
            q[c] = vert(g[0], g[1], g[2]);
          }
          if (!side) std::swap(q[1], q[3]);
          m.triangles.push_back({q[0], q[1], q[2]});
          m.triangles.push_back({q[0], q[2], q[3]});
          if (split_groups) {
            const Vec3 c = (m.vertices[q[0]] + m.vertices[q[2]]) * 0.5;
            const std::int32_t gid = c.x > 0 ? 1 : 0;
            m.face_groups.push_back(gid);
            m.face_groups.push_back(gid);
          }
        }
    }
  return m;
}

TriangleMesh icosphere(double radius, int subdivisions) {
  const double g = std::numbers::phi;
  TriangleMesh m;
  m.vertices = {{-1, g, 0}, {1, g, 0}, {-1, -g, 0}, {1, -g, 0}, {0, -1, g}, {0, 1, g},
                {0, -1, -g}, {0, 1, -g}, {g, 0, -1}, {g, 0, 1}, {-g, 0, -1}, {-g, 0, 1}};
  m.triangles = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                 {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
                 {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      auto [it, fresh] = mid.try_emplace({std::min(a, b), std::max(a, b)}, std::uint32_t(m.vertices.size()));
      if (fresh) m.vertices.push_back((m.vertices[a] + m.vertices[b]) * 0.5);
      return it->second;
    };
    std::vector<geometry::Triangle> next;
    for (const auto& t : m.triangles) {
      const auto a = midpoint(t[0], t[1]), b = midpoint(t[1], t[2]), c = midpoint(t[2], t[0]);
      next.push_back({t[0], a, c});
      next.push_back({t[1], b, a});
      next.push_back({t[2], c, b});
      next.push_back({a, b, c});
    }
    m.triangles = std::move(next);
  }
  for (auto& v : m.vertices) v = radius * normalized(v);
  return m;
}

TriangleMesh torus(double major, double minor, int nu, int nv) {
  TriangleMesh m;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const double u = 2 * std::numbers::pi * i / nu, v = 2 * std::numbers::pi * j / nv;
      const double r = major + minor * std::cos(v);
      m.vertices.push_back({r * std::cos(u), r * std::sin(u), minor * std::sin(v)});
    }
  auto id = [&](int i, int j) { return static_cast<std::uint32_t>((i % nu) * nv + (j % nv)); };
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return m;
}

double box_sdf(const Vec3& p, const Vec3& lo, const Vec3& hi) {
  const Vec3 c = (lo + hi) * 0.5, h = (hi - lo) * 0.5;
  const Vec3 q{std::abs(p.x - c.x) - h.x, std::abs(p.y - c.y) - h.y, std::abs(p.z - c.z) - h.z};
  const Vec3 outside{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
  return norm(outside) + std::min(std::max({q.x, q.y, q.z}), 0.0);
}

TriangleMesh mesh_from_sdf(const SdfFn& sdf, const Aabb& box, int res) {
  ScalarGrid g = make_grid(box, res);
  const double tau = 4 * g.spacing;
  fill_grid(g, [&](const Vec3& p) { return sampling::tsdf_map(sdf(p), tau); });
  return largest_component(marching_cubes(g, 0.5));
}

double car_proxy_sdf(const Vec3& p) {
  // z bounds chosen so the whole thing is centred on the origin
  const double body = box_sdf(p, {-0.5, -0.22, -0.16}, {0.5, 0.22, 0.02});
  const double cabin = box_sdf(p, {-0.24, -0.18, 0.01}, {0.16, 0.18, 0.16});
  const double wing = box_sdf(p, {0.36, -0.2, 0.01}, {0.4, 0.2, 0.10});
  return std::min({body, cabin, wing});
}

TriangleMesh car_proxy(int res) {
  // marching cubes lands a hair off the analytic box, so renormalize
  return geometry::normalize_mesh(mesh_from_sdf(car_proxy_sdf, {{-0.5, -0.22, -0.16}, {0.5, 0.22, 0.16}}, res)).mesh;
}

double pocket_box_sdf(const Vec3& p) {
  const double outer = box_sdf(p, {-0.5, -0.25, -0.2}, {0.5, 0.25, 0.2});
  const double pocket = box_sdf(p, {-0.25, -0.12, 0.0}, {0.25, 0.12, 0.3});
  return std::max(outer, -pocket);
}

TriangleMesh pocket_box(int res) {
  return mesh_from_sdf(pocket_box_sdf, {{-0.5, -0.25, -0.2}, {0.5, 0.25, 0.2}}, res);
}

FinCube fin_cube(double t, double fin_height) {
  FinCube f;
  f.mesh = box_mesh({-0.25, -0.25, -0.25}, {0.25, 0.25, 0.25});
  // the fin reaches into the cube so no seam is visible
  geometry::append(f.mesh, box_mesh({-0.2, -t / 2, 0.0}, {0.2, t / 2, 0.25 + fin_height}));
  const double cube_area = 6 * 0.25 - 0.4 * t;
  f.fin_area = 2 * 0.4 * fin_height + 2 * t * fin_height + 0.4 * t;
  f.total_area = cube_area + f.fin_area;
  return f;
}

ScalarGrid detached_wing_grid(int res) {
  ScalarGrid g = make_grid({{-0.5, -0.25, -0.25}, {0.5, 0.25, 0.25}}, res);
  const double h = g.spacing;
  const Vec3 strut_lo{0.3 - 1.5 * h, -1.5 * h, 0.0}, strut_hi{0.3 + 1.5 * h, 1.5 * h, 0.17};
  fill_grid(g, [&](const Vec3& p) {
    const double body = sampling::tsdf_map(box_sdf(p, {-0.45, -0.2, -0.2}, {0.45, 0.2, 0.05}), 0.02);
    const double wing = sampling::tsdf_map(box_sdf(p, {0.2, -0.2, 0.15}, {0.4, 0.2, 0.2}), 0.02);
    // flat at 0.47 inside the strut, gone one cell outside it
    const double out = std::max(0.0, box_sdf(p, strut_lo, strut_hi));
    const double strut = 0.47 * std::clamp(1.0 - out / h, 0.0, 1.0);
    return std::max({body, wing, strut});
  });
  return g;
}

}  // namespace vrecon::recon
