#include "vrecon/sampling/scan.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vrecon/core/error.hpp"
#include "vrecon/geometry/raster.hpp"

namespace vrecon::sampling {

std::vector<Vec3> camera_directions(int n_cams) {
  if (n_cams < 6) throw Error(ErrorCode::Invalid, "at least six scan cameras are needed");
  std::vector<Vec3> dirs{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  const double g = std::numbers::phi;
  for (double a : {-1.0, 1.0})
    for (double b : {-g, g}) {
      dirs.push_back(normalized(Vec3{0, a, b}));
      dirs.push_back(normalized(Vec3{a, b, 0}));
      dirs.push_back(normalized(Vec3{b, 0, a}));
    }
  const int extra = n_cams - static_cast<int>(dirs.size());
  for (int i = 0; i < extra; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / extra;
    const double r = std::sqrt(std::max(0.0, 1 - z * z));
    const double phi = i * std::numbers::pi * (3.0 - std::sqrt(5.0));
    dirs.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  dirs.resize(static_cast<std::size_t>(n_cams));
  return dirs;
}

SurfaceScan scan_mesh(const geometry::TriangleMesh& mesh, int n_cams, int resolution) {
  if (mesh.empty()) throw Error(ErrorCode::EmptyInput, "cannot scan an empty mesh");
  if (resolution < 8) throw Error(ErrorCode::Invalid, "scan resolution must be at least 8");
  const auto dirs = camera_directions(n_cams);
  const Aabb box = mesh.bounds();
  const double radius = 0.5 * box.diagonal() * 1.02;
  const double zlo = box.lo.z, zspan = std::max(1e-12, box.extent().z);

  SurfaceScan scan;
  scan.spacing = 2 * radius / resolution;
  for (std::size_t c = 0; c < dirs.size(); ++c) {
    const auto view = geometry::sphere_view(dirs[c], box.center(), radius, resolution);
    const auto r = geometry::render_view(mesh, view);
    const auto crease = geometry::crease_strength(r);
    for (int y = 0; y < view.height; ++y)
      for (int x = 0; x < view.width; ++x) {
        if (r.mask.at(x, y) < 0.5f) continue;
        const Vec3 p = view.unproject({double(x), double(y)}, r.depth.at(x, y));
        const auto& n = r.normal.at(x, y);
        scan.points.push_back(p);
        scan.normals.push_back(normalized(Vec3{n[0], n[1], n[2]}));
        scan.edge.push_back(std::clamp(crease.at(x, y), 0.0f, 1.0f));
        scan.rel_height.push_back(static_cast<float>(std::clamp((p.z - zlo) / zspan, 0.0, 1.0)));
        scan.camera.push_back(static_cast<std::uint16_t>(c));
      }
    scan.cameras.push_back({view, r.depth, r.mask});
  }
  if (scan.points.empty()) throw Error(ErrorCode::EmptyInput, "scan produced no points");
  scan.tree = std::make_shared<const geometry::KdTree>(scan.points);
  return scan;
}

namespace {

// Tolerance in model units: points closer to the surface than this are not
// claimed as visible.
constexpr double kVisibilitySlack = 1e-3;

bool camera_sees(const ScanCamera& cam, const Vec3& p) {
  const auto& v = cam.view;
  const auto q = v.project(p);
  const int w = v.width, h = v.height;
  if (q.u < -0.5 || q.v < -0.5 || q.u >= w - 0.5 || q.v >= h - 0.5) return true;
  const int x0 = std::clamp(static_cast<int>(std::floor(q.u)), 0, w - 1);
  const int y0 = std::clamp(static_cast<int>(std::floor(q.v)), 0, h - 1);
  const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
  const int xs[2] = {x0, x1}, ys[2] = {y0, y1};
  int covered = 0;
  double dmin = 2.0, dmax = -1.0;
  for (int y : ys)
    for (int x : xs)
      if (cam.mask.at(x, y) > 0.5f) {
        ++covered;
        dmin = std::min(dmin, double(cam.depth.at(x, y)));
        dmax = std::max(dmax, double(cam.depth.at(x, y)));
      }
  if (covered == 0) {
    // clear only if the wider neighbourhood is empty too
    for (int y = std::max(0, y0 - 1); y <= std::min(h - 1, y1 + 1); ++y)
      for (int x = std::max(0, x0 - 1); x <= std::min(w - 1, x1 + 1); ++x)
        if (cam.mask.at(x, y) > 0.5f) return false;
    return true;
  }
  const double span = v.near - v.far;
  const double pixel = (v.right_max - v.right_min) / w;
  double surface = dmin;
  if (covered == 4 && (dmax - dmin) * span < 2 * pixel) {
    const double fx = std::clamp(q.u - x0, 0.0, 1.0), fy = std::clamp(q.v - y0, 0.0, 1.0);
    const double top = cam.depth.at(x0, y0) * (1 - fx) + cam.depth.at(x1, y0) * fx;
    const double bot = cam.depth.at(x0, y1) * (1 - fx) + cam.depth.at(x1, y1) * fx;
    surface = top * (1 - fy) + bot * fy;
  }
  return v.depth(p) < surface - kVisibilitySlack / span;
}

}  // namespace

bool seen_from_outside(const SurfaceScan& scan, const Vec3& p) {
  for (const auto& cam : scan.cameras)
    if (camera_sees(cam, p)) return true;
  return false;
}

double signed_distance(const SurfaceScan& scan, const Vec3& p) {
  if (!scan.tree) throw Error(ErrorCode::EmptyInput, "scan has no points");
  const double d = scan.tree->nearest(p).distance;
  return seen_from_outside(scan, p) ? d : -d;
}

}  // namespace vrecon::sampling
