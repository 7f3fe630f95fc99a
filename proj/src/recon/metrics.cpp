#include "vrecon/recon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vrecon/core/error.hpp"
#include "vrecon/core/random.hpp"
#include "vrecon/geometry/kdtree.hpp"
#include "vrecon/geometry/parity.hpp"

namespace vrecon::recon {

std::vector<Vec3> sample_surface(const geometry::TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  if (mesh.empty()) throw Error(ErrorCode::EmptyInput, "cannot sample an empty surface");
  std::vector<double> cdf(mesh.triangles.size());
  for (std::size_t t = 0; t < cdf.size(); ++t) cdf[t] = geometry::triangle_area(mesh, t);
  std::partial_sum(cdf.begin(), cdf.end(), cdf.begin());
  Rng rng(seed);
  std::vector<Vec3> out(n);
  for (auto& p : out) {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), uniform01(rng) * cdf.back());
    const auto& tri = mesh.triangles[std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1)];
    double a = uniform01(rng), b = uniform01(rng);
    if (a + b > 1) { a = 1 - a; b = 1 - b; }
    const Vec3& v0 = mesh.vertices[tri[0]];
    p = v0 + a * (mesh.vertices[tri[1]] - v0) + b * (mesh.vertices[tri[2]] - v0);
  }
  return out;
}

namespace {

double directed_mean(const std::vector<Vec3>& from, const geometry::KdTree& to) {
  double sum = 0;
  for (const auto& p : from) sum += to.nearest(p).distance;
  return sum / static_cast<double>(from.size());
}

}  // namespace

Metrics eval_metrics(const geometry::TriangleMesh& recon, const geometry::TriangleMesh& truth,
                     std::size_t n, int res, std::uint64_t seed) {
  if (recon.empty() || truth.empty()) throw Error(ErrorCode::EmptyInput, "metrics need two non-empty meshes");
  Aabb box = recon.bounds();
  const Aabb tb = truth.bounds();
  box.extend(tb.lo);
  box.extend(tb.hi);
  const Vec3 e = box.extent();
  const double h = std::max({e.x, e.y, e.z}) / res;
  const int nx = std::max(1, static_cast<int>(std::ceil(e.x / h))), ny = std::max(1, static_cast<int>(std::ceil(e.y / h))),
            nz = std::max(1, static_cast<int>(std::ceil(e.z / h)));
  const geometry::ParityScanner sa(recon), sb(truth);
  std::int64_t inter = 0, uni = 0;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j) {
      // cell centres, offset slightly off-lattice to avoid grazing mesh edges
      const double y = box.lo.y + (j + 0.5) * h + 1.234e-7, z = box.lo.z + (k + 0.5) * h + 2.345e-7;
      const auto ca = sa.crossings(y, z), cb = sb.crossings(y, z);
      for (int i = 0; i < nx; ++i) {
        const double x = box.lo.x + (i + 0.5) * h;
        const bool a = (std::lower_bound(ca.begin(), ca.end(), x) - ca.begin()) % 2 == 1;
        const bool b = (std::lower_bound(cb.begin(), cb.end(), x) - cb.begin()) % 2 == 1;
        inter += a && b;
        uni += a || b;
      }
    }
  Metrics m;
  m.iou = uni ? static_cast<double>(inter) / static_cast<double>(uni) : 1.0;
  const auto pa = sample_surface(recon, n, derive_seed(seed, 1));
  const auto pb = sample_surface(truth, n, derive_seed(seed, 2));
  const geometry::KdTree ta(pa), tb2(pb);
  m.chamfer = 0.5 * (directed_mean(pa, tb2) + directed_mean(pb, ta));
  return m;
}

}  // namespace vrecon::recon
