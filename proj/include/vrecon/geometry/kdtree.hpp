#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "vrecon/core/vec3.hpp"

namespace vrecon::geometry {

struct Neighbor {
  std::uint32_t index = 0;
  double distance = 0.0;
};

// Exact Euclidean nearest-neighbour index, median-split construction.
// Equidistant candidates resolve to the lowest point index.
class KdTree {
 public:
  // Throws EmptyInput for an empty cloud.
  explicit KdTree(std::vector<Vec3> points);

  Neighbor nearest(const Vec3& q) const;
  // Nearest point whose index satisfies `accept`; nullopt if none does.
  std::optional<Neighbor> nearest_if(const Vec3& q,
                                     const std::function<bool(std::uint32_t)>& accept) const;

  std::size_t size() const { return points_.size(); }
  const std::vector<Vec3>& points() const { return points_; }

 private:
  struct Best {
    double d2;
    std::uint32_t index;
    bool found;
  };
  void build(std::size_t lo, std::size_t hi);
  template <class Accept>
  void search(std::size_t lo, std::size_t hi, const Vec3& q, Best& best, const Accept& accept) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint8_t> split_dim_;
};

}  // namespace vrecon::geometry
