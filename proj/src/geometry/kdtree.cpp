#include "vrecon/geometry/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vrecon/core/error.hpp"

namespace vrecon::geometry {
namespace {
constexpr std::size_t kLeafSize = 8;
}

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
  if (points_.empty()) throw Error(ErrorCode::EmptyInput, "k-d tree needs at least one point");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  split_dim_.assign(points_.size(), 0);
  build(0, points_.size());
}

void KdTree::build(std::size_t lo, std::size_t hi) {
  if (hi - lo <= kLeafSize) return;
  Aabb box;
  for (std::size_t i = lo; i < hi; ++i) box.extend(points_[order_[i]]);
  const Vec3 e = box.extent();
  const int dim = (e.x >= e.y && e.x >= e.z) ? 0 : (e.y >= e.z ? 1 : 2);
  const std::size_t mid = lo + (hi - lo) / 2;
  std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double pa = points_[a][dim], pb = points_[b][dim];
                     return pa < pb || (pa == pb && a < b);
                   });
  split_dim_[mid] = static_cast<std::uint8_t>(dim);
  build(lo, mid);
  build(mid + 1, hi);
}

template <class Accept>
void KdTree::search(std::size_t lo, std::size_t hi, const Vec3& q, Best& best,
                    const Accept& accept) const {
  auto consider = [&](std::uint32_t idx) {
    if (!accept(idx)) return;
    const double d2 = norm2(points_[idx] - q);
    if (!best.found || d2 < best.d2 || (d2 == best.d2 && idx < best.index)) best = {d2, idx, true};
  };
  if (hi - lo <= kLeafSize) {
    for (std::size_t i = lo; i < hi; ++i) consider(order_[i]);
    return;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  const int dim = split_dim_[mid];
  const double diff = q[dim] - points_[order_[mid]][dim];
  consider(order_[mid]);
  const bool left_first = diff <= 0;
  if (left_first) search(lo, mid, q, best, accept);
  else search(mid + 1, hi, q, best, accept);
  // `<=` keeps equidistant points on the far side reachable for the index tie rule.
  if (!best.found || diff * diff <= best.d2) {
    if (left_first) search(mid + 1, hi, q, best, accept);
    else search(lo, mid, q, best, accept);
  }
}

Neighbor KdTree::nearest(const Vec3& q) const {
  Best best{std::numeric_limits<double>::infinity(), 0, false};
  search(0, points_.size(), q, best, [](std::uint32_t) { return true; });
  return {best.index, std::sqrt(best.d2)};
}

std::optional<Neighbor> KdTree::nearest_if(const Vec3& q,
                                           const std::function<bool(std::uint32_t)>& accept) const {
  Best best{std::numeric_limits<double>::infinity(), 0, false};
  search(0, points_.size(), q, best, accept);
  if (!best.found) return std::nullopt;
  return Neighbor{best.index, std::sqrt(best.d2)};
}

}  // namespace vrecon::geometry
