#include "vrecon/sampling/hull.hpp"

#include <cmath>

#include "vrecon/core/parallel.hpp"
#include "vrecon/img/ops.hpp"
#include "vrecon/views/synth.hpp"

namespace vrecon::sampling {

std::size_t VoxelGrid::count() const {
  std::size_t n = 0;
  for (auto o : occupied) n += o;
  return n;
}

std::vector<Vec3> VoxelGrid::boundary_points() const {
  std::vector<Vec3> out;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        if (!occupied[index(i, j, k)]) continue;
        if (!at(i - 1, j, k) || !at(i + 1, j, k) || !at(i, j - 1, k) || !at(i, j + 1, k) ||
            !at(i, j, k - 1) || !at(i, j, k + 1))
          out.push_back(center(i, j, k));
      }
  return out;
}

Aabb VoxelGrid::occupied_bounds() const {
  Aabb b;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        if (occupied[index(i, j, k)]) b.extend(center(i, j, k));
  return b;
}

VoxelGrid visual_hull(const views::ViewSet& set, int res) {
  if (res < 2) throw Error(ErrorCode::Invalid, "hull resolution must be at least 2");
  const Aabb frame = views::blueprint_frame(set);
  struct Silhouette {
    geometry::OrthoView cam;
    img::GrayImage mask;
  };
  std::vector<Silhouette> sil;
  for (auto kind : views::kCanonicalOrder) {
    auto mask = views::oriented_mask(set, kind);
    img::GrayImage m = mask ? *mask : img::silhouette_from_drawing(views::oriented_image(set, kind));
    bool any = false;
    for (float v : m.data) any = any || v > 0.5f;
    if (!any) throw Error(ErrorCode::EmptyHull, std::string(views::to_string(kind)) + " silhouette is empty");
    sil.push_back({views::view_camera(set, kind, frame), std::move(m)});
  }

  VoxelGrid g;
  g.spacing = frame.extent().x / res;
  const Vec3 e = frame.extent();
  g.nx = res + 4;
  g.ny = static_cast<int>(std::ceil(e.y / g.spacing)) + 4;
  g.nz = static_cast<int>(std::ceil(e.z / g.spacing)) + 4;
  // centre the lattice on the frame
  g.origin = frame.center() - 0.5 * g.spacing * Vec3{double(g.nx - 1), double(g.ny - 1), double(g.nz - 1)};
  g.occupied.assign(static_cast<std::size_t>(g.nx) * g.ny * g.nz, 0);
  parallel_for(static_cast<std::size_t>(g.nz), [&](std::size_t kk) {
    const int k = static_cast<int>(kk);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const Vec3 c = g.center(i, j, k);
        bool in = true;
        for (const auto& s : sil) {
          const auto q = s.cam.project(c);
          const int x = static_cast<int>(std::floor(q.u + 0.5)), y = static_cast<int>(std::floor(q.v + 0.5));
          if (x < 0 || y < 0 || x >= s.mask.width || y >= s.mask.height || s.mask.at(x, y) < 0.5f) {
            in = false;
            break;
          }
        }
        g.occupied[g.index(i, j, k)] = in;
      }
  });
  if (g.count() == 0) throw Error(ErrorCode::EmptyHull, "silhouettes do not intersect");
  return g;
}

}  // namespace vrecon::sampling
