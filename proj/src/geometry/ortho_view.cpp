#include "vrecon/geometry/ortho_view.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "vrecon/core/error.hpp"

namespace vrecon::geometry {

const char* to_string(ViewKind kind) {
  switch (kind) {
    case ViewKind::Front: return "front";
    case ViewKind::Back: return "back";
    case ViewKind::Side: return "side";
    case ViewKind::Top: return "top";
    case ViewKind::Custom: return "custom";
  }
  return "unknown";
}

ImagePoint OrthoView::project(const Vec3& p) const {
  const double r = dot(p, right());
  const double s = dot(p, up);
  return {(r - right_min) / (right_max - right_min) * width - 0.5,
          (up_max - s) / (up_max - up_min) * height - 0.5};
}

double OrthoView::depth(const Vec3& p) const {
  return (near - dot(p, -axis)) / (near - far);
}

Vec3 OrthoView::unproject(const ImagePoint& q, double depth01) const {
  const double r = right_min + (q.u + 0.5) / width * (right_max - right_min);
  const double s = up_max - (q.v + 0.5) / height * (up_max - up_min);
  const double h = near - depth01 * (near - far);
  return r * right() + s * up + h * (-axis);
}

namespace {

void frame_for(ViewKind kind, Vec3& axis, Vec3& up) {
  switch (kind) {
    case ViewKind::Front: axis = {-1, 0, 0}; up = {0, 0, 1}; return;
    case ViewKind::Back: axis = {1, 0, 0}; up = {0, 0, 1}; return;
    case ViewKind::Side: axis = {0, -1, 0}; up = {0, 0, 1}; return;
    case ViewKind::Top: axis = {0, 0, -1}; up = {0, -1, 0}; return;
    case ViewKind::Custom: break;
  }
  throw Error(ErrorCode::Invalid, "canonical view requested for a custom kind");
}

OrthoView fit_box(ViewKind kind, const Aabb& box) {
  OrthoView v;
  v.kind = kind;
  frame_for(kind, v.axis, v.up);
  const Vec3 right = v.right();
  double rmin = 1e300, rmax = -1e300, umin = 1e300, umax = -1e300, hmin = 1e300, hmax = -1e300;
  for (int c = 0; c < 8; ++c) {
    const Vec3 p{(c & 1) ? box.hi.x : box.lo.x, (c & 2) ? box.hi.y : box.lo.y,
                 (c & 4) ? box.hi.z : box.lo.z};
    rmin = std::min(rmin, dot(p, right)); rmax = std::max(rmax, dot(p, right));
    umin = std::min(umin, dot(p, v.up)); umax = std::max(umax, dot(p, v.up));
    const double h = dot(p, -v.axis);
    hmin = std::min(hmin, h); hmax = std::max(hmax, h);
  }
  if (!(rmax > rmin) || !(umax > umin))
    throw Error(ErrorCode::Dimension, "view rectangle is degenerate");
  v.right_min = rmin; v.right_max = rmax; v.up_min = umin; v.up_max = umax;
  v.near = hmax; v.far = hmin;
  if (!(v.near > v.far)) { v.near += 0.5; v.far -= 0.5; }
  return v;
}

}  // namespace

OrthoView canonical_view(ViewKind kind, const Aabb& box, double pixels_per_unit) {
  OrthoView v = fit_box(kind, box);
  v.width = std::max(1, static_cast<int>(std::lround((v.right_max - v.right_min) * pixels_per_unit)));
  v.height = std::max(1, static_cast<int>(std::lround((v.up_max - v.up_min) * pixels_per_unit)));
  return v;
}

OrthoView canonical_view_sized(ViewKind kind, const Aabb& box, int width, int height) {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::Dimension, "view size must be positive");
  OrthoView v = fit_box(kind, box);
  v.width = width;
  v.height = height;
  return v;
}

OrthoView sphere_view(const Vec3& axis, const Vec3& center, double radius, int resolution) {
  OrthoView v;
  v.kind = ViewKind::Custom;
  v.axis = normalized(axis);
  const Vec3 helper = std::abs(v.axis.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  v.up = normalized(helper - dot(helper, v.axis) * v.axis);
  const double rc = dot(center, v.right()), uc = dot(center, v.up), hc = dot(center, -v.axis);
  v.right_min = rc - radius; v.right_max = rc + radius;
  v.up_min = uc - radius; v.up_max = uc + radius;
  v.near = hc + radius; v.far = hc - radius;
  v.width = v.height = resolution;
  return v;
}

}  // namespace vrecon::geometry
