#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include "vrecon/core/error.hpp"
#include "vrecon/recon/grid.hpp"

namespace vrecon::recon {

namespace {

// Corner c of a cell has offset (c & 1, (c >> 1) & 1, (c >> 2) & 1).
Vec3 corner_offset(int c) { return {double(c & 1), double((c >> 1) & 1), double((c >> 2) & 1)}; }

struct CellTopology {
  std::array<std::array<int, 2>, 12> edge_corners{};
  std::array<std::array<int, 4>, 6> faces{};      // corners, counter-clockwise from outside
  std::array<std::array<int, 4>, 6> face_edges{};  // edge from faces[f][k] to faces[f][k+1]
  int edge_between(int a, int b) const {
    for (int e = 0; e < 12; ++e)
      if ((edge_corners[e][0] == a && edge_corners[e][1] == b) ||
          (edge_corners[e][0] == b && edge_corners[e][1] == a))
        return e;
    return -1;
  }
};

CellTopology build_topology() {
  CellTopology t;
  int e = 0;
  for (int a = 0; a < 8; ++a)
    for (int bit = 1; bit < 8; bit <<= 1)
      if (!(a & bit)) t.edge_corners[e++] = {a, a | bit};
  const Vec3 mid{0.5, 0.5, 0.5};
  int f = 0;
  for (int axis = 0; axis < 3; ++axis)
    for (int side = 0; side < 2; ++side) {
      Vec3 n{};
      (axis == 0 ? n.x : axis == 1 ? n.y : n.z) = side ? 1.0 : -1.0;
      std::vector<int> cs;
      for (int c = 0; c < 8; ++c)
        if (((c >> axis) & 1) == side) cs.push_back(c);
      const Vec3 u = std::abs(n.x) > 0.5 ? Vec3{0, 1, 0} : Vec3{1, 0, 0};
      const Vec3 v = cross(n, u);
      auto angle = [&](int c) {
        const Vec3 d = corner_offset(c) - mid;
        return std::atan2(dot(d, v), dot(d, u));
      };
      std::sort(cs.begin(), cs.end(), [&](int a, int b) { return angle(a) < angle(b); });
      for (int k = 0; k < 4; ++k) {
        t.faces[f][k] = cs[k];
        t.face_edges[f][k] = t.edge_between(cs[k], cs[(k + 1) % 4]);
      }
      ++f;
    }
  return t;
}

const CellTopology& topology() {
  static const CellTopology t = build_topology();
  return t;
}

// Closed loops of crossed cell edges for one inside-corner pattern. On each
// face a segment runs from an outside-to-inside crossing to the next
// inside-to-outside crossing, which keeps diagonal inside corners apart.
std::vector<std::vector<int>> cell_loops(unsigned inside_bits) {
  const auto& t = topology();
  std::array<int, 12> next;
  next.fill(-1);
  for (int f = 0; f < 6; ++f) {
    const auto& q = t.faces[f];
    auto in = [&](int k) { return (inside_bits >> q[((k % 4) + 4) % 4]) & 1u; };
    for (int k = 0; k < 4; ++k) {
      if (!(in(k) && !in(k + 1))) continue;  // inside-to-outside at face edge k
      for (int back = 1; back <= 4; ++back) {
        const int j = k - back;
        if (!in(j) && in(j + 1)) {
          next[t.face_edges[f][((j % 4) + 4) % 4]] = t.face_edges[f][k];
          break;
        }
      }
    }
  }
  std::vector<std::vector<int>> loops;
  std::array<bool, 12> used{};
  for (int s = 0; s < 12; ++s) {
    if (next[s] < 0 || used[s]) continue;
    std::vector<int> loop;
    for (int e = s; !used[e]; e = next[e]) {
      used[e] = true;
      loop.push_back(e);
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

struct CaseTable {
  std::array<std::vector<std::array<int, 3>>, 256> triangles;
};

CaseTable build_cases() {
  CaseTable table;
  for (unsigned c = 0; c < 256; ++c)
    for (const auto& loop : cell_loops(c))
      for (std::size_t k = 1; k + 1 < loop.size(); ++k) table.triangles[c].push_back({loop[0], loop[k], loop[k + 1]});
  // Fix the winding once: with only corner 0 inside, normals must point away from it.
  const auto& t = topology();
  const auto& tri = table.triangles[1].at(0);
  auto mid = [&](int e) { return 0.5 * (corner_offset(t.edge_corners[e][0]) + corner_offset(t.edge_corners[e][1])); };
  const Vec3 n = cross(mid(tri[1]) - mid(tri[0]), mid(tri[2]) - mid(tri[0]));
  if (dot(n, Vec3{1, 1, 1}) < 0)
    for (auto& list : table.triangles)
      for (auto& tr : list) std::swap(tr[1], tr[2]);
  return table;
}

const CaseTable& cases() {
  static const CaseTable table = build_cases();
  return table;
}

}  // namespace

geometry::TriangleMesh marching_cubes(const ScalarGrid& grid, double iso) {
  if (grid.nx < 2 || grid.ny < 2 || grid.nz < 2)
    throw Error(ErrorCode::Dimension, "marching cubes needs at least 2 nodes per axis");
  if (grid.values.size() != static_cast<std::size_t>(grid.nx) * grid.ny * grid.nz)
    throw Error(ErrorCode::Dimension, "grid value count does not match its dimensions");
  const auto& t = topology();
  const auto& table = cases();
  // Exact hits on iso are nudged inside so every crossing lies strictly
  // between two nodes.
  auto value = [&](std::size_t idx) {
    const double v = grid.values[idx];
    return v == iso ? iso + 1e-7 : v;
  };

  geometry::TriangleMesh mesh;
  std::unordered_map<std::uint64_t, std::uint32_t> weld;
  for (int k = 0; k + 1 < grid.nz; ++k)
    for (int j = 0; j + 1 < grid.ny; ++j)
      for (int i = 0; i + 1 < grid.nx; ++i) {
        std::array<std::size_t, 8> idx;
        std::array<double, 8> val;
        unsigned bits = 0;
        for (int c = 0; c < 8; ++c) {
          idx[c] = grid.index(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
          val[c] = value(idx[c]);
          if (val[c] > iso) bits |= 1u << c;
        }
        const auto& tris = table.triangles[bits];
        if (tris.empty()) continue;
        std::array<std::int64_t, 12> vid;
        vid.fill(-1);
        auto vertex = [&](int e) -> std::uint32_t {
          if (vid[e] >= 0) return static_cast<std::uint32_t>(vid[e]);
          const int a = t.edge_corners[e][0], b = t.edge_corners[e][1];
          const int axis = (b ^ a) == 1 ? 0 : (b ^ a) == 2 ? 1 : 2;
          const std::uint64_t key = static_cast<std::uint64_t>(idx[a]) * 3 + axis;
          auto [it, fresh] = weld.try_emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
          if (fresh) {
            const double s = (iso - val[a]) / (val[b] - val[a]);
            const Vec3 pa = grid.node(i + (a & 1), j + ((a >> 1) & 1), k + ((a >> 2) & 1));
            const Vec3 pb = grid.node(i + (b & 1), j + ((b >> 1) & 1), k + ((b >> 2) & 1));
            mesh.vertices.push_back(pa + s * (pb - pa));
          }
          vid[e] = it->second;
          return it->second;
        };
        for (const auto& tr : tris) mesh.triangles.push_back({vertex(tr[0]), vertex(tr[1]), vertex(tr[2])});
      }
  return mesh;
}

}  // namespace vrecon::recon
