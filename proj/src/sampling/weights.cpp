#include "vrecon/sampling/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>

#include "vrecon/core/parallel.hpp"

namespace vrecon::sampling {

double w_normal(double rel_height, double normal_down) {
  if (rel_height < 0.05 || rel_height > 0.5 || normal_down > -0.95) return 1.0;
  return rel_height;
}

namespace {

// Spatial tree whose nodes also bound their members' normals, so subtrees
// that cannot hold a normal past the angle threshold are skipped whole.
class OrientedTree {
 public:
  OrientedTree(const std::vector<Vec3>& points, const std::vector<Vec3>& normals)
      : points_(points), normals_(normals), order_(points.size()) {
    std::iota(order_.begin(), order_.end(), 0u);
    if (!order_.empty()) build(0, order_.size());
  }

  // Squared distance to the nearest point with dot(normal, n) < cos_limit.
  double nearest2(const Vec3& p, const Vec3& n, double cos_limit) const {
    double best = std::numeric_limits<double>::infinity();
    if (!nodes_.empty()) search(0, p, n, cos_limit, best);
    return best;
  }

 private:
  struct Node {
    Aabb box, normals;
    std::uint32_t lo, hi;
    std::int32_t left = -1, right = -1;
  };

  std::int32_t build(std::size_t lo, std::size_t hi) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({});
    Node node;
    node.lo = static_cast<std::uint32_t>(lo);
    node.hi = static_cast<std::uint32_t>(hi);
    for (std::size_t i = lo; i < hi; ++i) {
      node.box.extend(points_[order_[i]]);
      node.normals.extend(normals_[order_[i]]);
    }
    if (hi - lo > 8) {
      const Vec3 e = node.box.extent();
      const int dim = e.x >= e.y && e.x >= e.z ? 0 : e.y >= e.z ? 1 : 2;
      const std::size_t mid = (lo + hi) / 2;
      std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                       [&](std::uint32_t a, std::uint32_t b) { return coord(points_[a], dim) < coord(points_[b], dim); });
      node.left = build(lo, mid);
      node.right = build(mid, hi);
    }
    nodes_[id] = node;
    return id;
  }

  static double coord(const Vec3& v, int d) { return d == 0 ? v.x : d == 1 ? v.y : v.z; }

  static double box_distance2(const Aabb& b, const Vec3& p) {
    const double dx = std::max({b.lo.x - p.x, 0.0, p.x - b.hi.x});
    const double dy = std::max({b.lo.y - p.y, 0.0, p.y - b.hi.y});
    const double dz = std::max({b.lo.z - p.z, 0.0, p.z - b.hi.z});
    return dx * dx + dy * dy + dz * dz;
  }

  // Smallest dot(n, m) over m in the node's normal box.
  static double min_dot(const Aabb& nb, const Vec3& n) {
    return std::min(n.x * nb.lo.x, n.x * nb.hi.x) + std::min(n.y * nb.lo.y, n.y * nb.hi.y) +
           std::min(n.z * nb.lo.z, n.z * nb.hi.z);
  }

  void search(std::int32_t id, const Vec3& p, const Vec3& n, double cos_limit, double& best) const {
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (min_dot(node.normals, n) >= cos_limit) return;
    if (box_distance2(node.box, p) >= best) return;
    if (node.left < 0) {
      for (std::uint32_t i = node.lo; i < node.hi; ++i) {
        const auto k = order_[i];
        if (dot(n, normals_[k]) >= cos_limit) continue;
        best = std::min(best, norm2(points_[k] - p));
      }
      return;
    }
    const double dl = box_distance2(nodes_[static_cast<std::size_t>(node.left)].box, p);
    const double dr = box_distance2(nodes_[static_cast<std::size_t>(node.right)].box, p);
    if (dl <= dr) {
      search(node.left, p, n, cos_limit, best);
      search(node.right, p, n, cos_limit, best);
    } else {
      search(node.right, p, n, cos_limit, best);
      search(node.left, p, n, cos_limit, best);
    }
  }

  const std::vector<Vec3>& points_;
  const std::vector<Vec3>& normals_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace

std::vector<double> thickness_weights(const SurfaceScan& scan, const SamplerConfig& cfg) {
  // Taking the maximum over the three axis splits is the same as taking the
  // nearest qualifying point overall: two normals more than 90 degrees apart
  // always have opposite signs on some axis.
  const std::size_t n = scan.size();
  const double cos_t = std::cos(cfg.thickness_angle_threshold * std::numbers::pi / 180.0);
  const OrientedTree tree(scan.points, scan.normals);
  std::vector<double> out(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const double best2 = tree.nearest2(scan.points[i], scan.normals[i], cos_t);
    if (!std::isfinite(best2)) return;
    const double raw = 1.0 / std::max(std::sqrt(best2), cfg.dist_floor);
    out[i] = std::min(raw, cfg.thickness_clip) / cfg.thickness_clip;
  });
  return out;
}

SampleWeights compute_weights(const SurfaceScan& scan, const VoxelGrid& hull, const SamplerConfig& cfg) {
  cfg.validate();
  const std::size_t n = scan.size();
  SampleWeights w;
  w.edge.resize(n);
  w.normal.resize(n);
  w.hull_dist.assign(n, 0.0);
  w.hull_dist_normal.resize(n);
  w.thickness.assign(n, 0.0);
  w.weight.resize(n);

  if (cfg.use_hull_distance) {
    const auto boundary = hull.boundary_points();
    if (boundary.empty()) throw Error(ErrorCode::EmptyHull, "hull has no boundary voxels");
    Aabb hb;
    for (const auto& p : boundary) hb.extend(p);
    const double scale = cfg.hull_dist_scale * std::max(hb.diagonal(), hull.spacing);
    const geometry::KdTree tree(boundary);
    parallel_for(n, [&](std::size_t i) {
      w.hull_dist[i] = std::clamp(tree.nearest(scan.points[i]).distance / scale, 0.0, 1.0);
    });
  }
  if (cfg.use_thickness) w.thickness = thickness_weights(scan, cfg);

  const double beta = cfg.hull_dist_normal_floor;
  for (std::size_t i = 0; i < n; ++i) {
    w.edge[i] = std::clamp(double(scan.edge[i]), cfg.edge_floor, 1.0);
    // Z is up, so the downward-facing test reads the normal's Z component
    w.normal[i] = w_normal(scan.rel_height[i], scan.normals[i].z);
    w.hull_dist_normal[i] = beta + (1 - beta) * w.normal[i];
    w.weight[i] = w.edge[i] * w.normal[i] + w.hull_dist[i] * w.hull_dist_normal[i] + w.thickness[i];
  }
  const double total = std::accumulate(w.weight.begin(), w.weight.end(), 0.0);
  if (!(total > 0) || !std::isfinite(total)) throw Error(ErrorCode::ZeroWeights, "sampling weights sum to zero");
  for (auto& x : w.weight) x /= total;
  return w;
}

}  // namespace vrecon::sampling
