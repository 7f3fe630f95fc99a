#include <algorithm>
#include <cmath>
#include <numeric>

#include "vrecon/core/binary_io.hpp"
#include "vrecon/core/parallel.hpp"
#include "vrecon/recon/grid.hpp"

namespace vrecon::recon {

ScalarGrid make_grid(const Aabb& box, int res_x) {
  if (res_x < 1 || box.empty() || !(box.extent().x > 0))
    throw Error(ErrorCode::Dimension, "grid needs a positive X extent and resolution");
  ScalarGrid g;
  g.spacing = box.extent().x / res_x;
  const Vec3 e = box.extent();
  g.nx = res_x + 1 + 4;
  g.ny = static_cast<int>(std::ceil(e.y / g.spacing - 1e-9)) + 1 + 4;
  g.nz = static_cast<int>(std::ceil(e.z / g.spacing - 1e-9)) + 1 + 4;
  g.origin = box.center() - 0.5 * g.spacing * Vec3{double(g.nx - 1), double(g.ny - 1), double(g.nz - 1)};
  g.values.assign(static_cast<std::size_t>(g.nx) * g.ny * g.nz, 0.0f);
  return g;
}

void fill_grid(ScalarGrid& grid, const std::function<double(const Vec3&)>& fn) {
  parallel_for(static_cast<std::size_t>(grid.nz), [&](std::size_t kk) {
    const int k = static_cast<int>(kk);
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) grid.values[grid.index(i, j, k)] = static_cast<float>(fn(grid.node(i, j, k)));
  });
}

namespace {

std::vector<std::uint32_t> vertex_components(const geometry::TriangleMesh& mesh, std::uint32_t& count) {
  std::vector<std::uint32_t> parent(mesh.vertices.size());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& t : mesh.triangles)
    for (int k = 1; k < 3; ++k) {
      const auto a = find(t[0]), b = find(t[k]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<std::uint32_t> label(mesh.vertices.size(), UINT32_MAX);
  count = 0;
  for (const auto& t : mesh.triangles) {
    const auto r = find(t[0]);
    if (label[r] == UINT32_MAX) label[r] = count++;
  }
  std::vector<std::uint32_t> out(mesh.triangles.size());
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) out[i] = label[find(mesh.triangles[i][0])];
  return out;
}

}  // namespace

int component_count(const geometry::TriangleMesh& mesh) {
  std::uint32_t count = 0;
  vertex_components(mesh, count);
  return static_cast<int>(count);
}

geometry::TriangleMesh largest_component(const geometry::TriangleMesh& mesh) {
  if (mesh.empty()) throw Error(ErrorCode::EmptyInput, "no surface to filter");
  std::uint32_t count = 0;
  const auto comp = vertex_components(mesh, count);
  std::vector<double> volume(count, 0.0);
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    volume[comp[i]] += dot(mesh.vertices[t[0]], cross(mesh.vertices[t[1]], mesh.vertices[t[2]])) / 6.0;
  }
  const auto keep = static_cast<std::uint32_t>(std::max_element(volume.begin(), volume.end()) - volume.begin());
  geometry::TriangleMesh out;
  std::vector<std::int64_t> remap(mesh.vertices.size(), -1);
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    if (comp[i] != keep) continue;
    geometry::Triangle t;
    for (int k = 0; k < 3; ++k) {
      auto& r = remap[mesh.triangles[i][k]];
      if (r < 0) {
        r = static_cast<std::int64_t>(out.vertices.size());
        out.vertices.push_back(mesh.vertices[mesh.triangles[i][k]]);
      }
      t[k] = static_cast<std::uint32_t>(r);
    }
    out.triangles.push_back(t);
    if (mesh.has_groups()) out.face_groups.push_back(mesh.face_groups[i]);
  }
  out.group_names = mesh.group_names;
  return out;
}

std::vector<std::uint8_t> write_grid(const ScalarGrid& grid) {
  ByteWriter w;
  w.tag("SGRD");
  w.u32(static_cast<std::uint32_t>(grid.nx));
  w.u32(static_cast<std::uint32_t>(grid.ny));
  w.u32(static_cast<std::uint32_t>(grid.nz));
  w.f32(static_cast<float>(grid.origin.x));
  w.f32(static_cast<float>(grid.origin.y));
  w.f32(static_cast<float>(grid.origin.z));
  w.f32(static_cast<float>(grid.spacing));
  w.bytes(grid.values.data(), grid.values.size() * sizeof(float));
  return w.take();
}

ScalarGrid read_grid(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  r.expect_tag("SGRD");
  ScalarGrid g;
  g.nx = static_cast<int>(r.u32());
  g.ny = static_cast<int>(r.u32());
  g.nz = static_cast<int>(r.u32());
  g.origin.x = r.f32();
  g.origin.y = r.f32();
  g.origin.z = r.f32();
  g.spacing = r.f32();
  const std::size_t n = static_cast<std::size_t>(g.nx) * g.ny * g.nz;
  if (r.remaining() != n * sizeof(float)) throw DecodeError("grid payload size mismatch", r.offset());
  g.values.resize(n);
  r.bytes(g.values.data(), n * sizeof(float));
  return g;
}

}  // namespace vrecon::recon
