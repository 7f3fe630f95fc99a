#include "vrecon/geometry/parity.hpp"

#include <algorithm>
#include <cmath>

#include "vrecon/core/random.hpp"

namespace vrecon::geometry {
namespace {

constexpr double kGraze = 1e-9;

enum class Hit { None, Crossing, Degenerate };

Hit intersect(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c, double& t) {
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 pv = cross(d, e2);
  const double det = dot(e1, pv);
  const double scale = norm(e1) * norm(e2);
  if (std::abs(det) <= 1e-12 * scale) {
    // Ray parallel to the plane: degenerate only if it lies in the plane.
    return std::abs(dot(o - a, normalized(cross(e1, e2)))) < kGraze ? Hit::Degenerate : Hit::None;
  }
  const double inv = 1.0 / det;
  const Vec3 s = o - a;
  const double u = dot(s, pv) * inv;
  if (u < -kGraze || u > 1 + kGraze) return Hit::None;
  const Vec3 qv = cross(s, e1);
  const double v = dot(d, qv) * inv;
  if (v < -kGraze || u + v > 1 + kGraze) return Hit::None;
  t = dot(e2, qv) * inv;
  if (t < -kGraze) return Hit::None;
  if (std::abs(t) <= kGraze) return Hit::Degenerate;
  if (u < kGraze || v < kGraze || u + v > 1 - kGraze) return Hit::Degenerate;
  return Hit::Crossing;
}

}  // namespace

bool ray_parity_inside(const TriangleMesh& mesh, const Vec3& p, const Vec3& direction) {
  Rng rng(splitmix64(static_cast<std::uint64_t>(std::hash<double>{}(p.x + 3.1 * p.y + 7.3 * p.z))));
  Vec3 dir = normalized(direction);
  for (int attempt = 0; attempt < 32; ++attempt) {
    int count = 0;
    bool degenerate = false;
    for (const auto& tri : mesh.triangles) {
      double t = 0;
      const Hit h = intersect(p, dir, mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                              mesh.vertices[tri[2]], t);
      if (h == Hit::Degenerate) { degenerate = true; break; }
      if (h == Hit::Crossing) ++count;
    }
    if (!degenerate) return count % 2 == 1;
    dir = normalized(Vec3{uniform01(rng) - 0.5, uniform01(rng) - 0.5, uniform01(rng) - 0.5});
  }
  return false;
}

ParityScanner::ParityScanner(const TriangleMesh& mesh, int bins)
    : mesh_(mesh), box_(mesh.bounds()), bins_(bins),
      cells_(static_cast<std::size_t>(bins) * bins) {
  if (mesh.empty()) return;
  const Vec3 e = box_.extent();
  auto cell = [&](double v, double lo, double ext) {
    return std::clamp(static_cast<int>((v - lo) / std::max(ext, 1e-300) * bins_), 0, bins_ - 1);
  };
  for (std::uint32_t t = 0; t < mesh.triangles.size(); ++t) {
    double ylo = 1e300, yhi = -1e300, zlo = 1e300, zhi = -1e300;
    for (auto k : mesh.triangles[t]) {
      const Vec3& v = mesh.vertices[k];
      ylo = std::min(ylo, v.y); yhi = std::max(yhi, v.y);
      zlo = std::min(zlo, v.z); zhi = std::max(zhi, v.z);
    }
    for (int j = cell(ylo, box_.lo.y, e.y); j <= cell(yhi, box_.lo.y, e.y); ++j)
      for (int k = cell(zlo, box_.lo.z, e.z); k <= cell(zhi, box_.lo.z, e.z); ++k)
        cells_[static_cast<std::size_t>(j) * bins_ + k].push_back(t);
  }
}

std::vector<double> ParityScanner::crossings(double y, double z) const {
  std::vector<double> xs;
  if (mesh_.empty() || y < box_.lo.y || y > box_.hi.y || z < box_.lo.z || z > box_.hi.z) return xs;
  const Vec3 e = box_.extent();
  const double base_y = y, base_z = z;
  const double jitter = 1e-7 * std::max({e.x, e.y, e.z});
  Rng rng(splitmix64(std::hash<double>{}(y * 1.7 + z)));
  for (int attempt = 0; attempt < 32; ++attempt) {
    const int j = std::clamp(static_cast<int>((y - box_.lo.y) / std::max(e.y, 1e-300) * bins_), 0, bins_ - 1);
    const int k = std::clamp(static_cast<int>((z - box_.lo.z) / std::max(e.z, 1e-300) * bins_), 0, bins_ - 1);
    const Vec3 origin{box_.lo.x - 1.0, y, z};
    xs.clear();
    bool degenerate = false;
    for (auto t : cells_[static_cast<std::size_t>(j) * bins_ + k]) {
      const auto& tri = mesh_.triangles[t];
      double hit = 0;
      const Hit h = intersect(origin, {1, 0, 0}, mesh_.vertices[tri[0]], mesh_.vertices[tri[1]],
                              mesh_.vertices[tri[2]], hit);
      if (h == Hit::Degenerate) { degenerate = true; break; }
      if (h == Hit::Crossing) xs.push_back(origin.x + hit);
    }
    if (!degenerate) break;
    y = base_y + jitter * (uniform01(rng) - 0.5);
    z = base_z + jitter * (uniform01(rng) - 0.5);
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

bool ParityScanner::inside(const Vec3& p) const {
  const auto xs = crossings(p.y, p.z);
  const auto beyond = xs.end() - std::upper_bound(xs.begin(), xs.end(), p.x);
  return beyond % 2 == 1;
}

}  // namespace vrecon::geometry
