#pragma once

#include <string>

#include "vrecon/core/vec3.hpp"

namespace vrecon::geometry {

// Canonical frame: X forward (length), Y lateral, Z up.
//   Front: camera on +X looking -X      Back: camera on -X looking +X
//   Side:  camera on +Y looking -Y      Top:  camera on +Z looking -Z
enum class ViewKind { Front, Back, Side, Top, Custom };

const char* to_string(ViewKind kind);

struct ImagePoint {
  double u = 0.0;  // continuous pixel column, pixel centres at integers
  double v = 0.0;  // continuous pixel row, top row is 0
};

// Orthographic camera. The image rectangle spans [right_min, right_max] x
// [up_min, up_max] in the (right, up) plane; depth in [0,1] spans the model
// extent along the viewing axis, 0 nearest the camera.
struct OrthoView {
  ViewKind kind = ViewKind::Custom;
  Vec3 axis{0, 0, -1};
  Vec3 up{0, 1, 0};
  double right_min = -0.5, right_max = 0.5;
  double up_min = -0.5, up_max = 0.5;
  double near = 0.5, far = -0.5;  // extremes of dot(p, -axis)
  int width = 1, height = 1;

  Vec3 right() const { return cross(axis, up); }
  double pixels_per_unit_x() const { return width / (right_max - right_min); }
  double pixels_per_unit_y() const { return height / (up_max - up_min); }

  ImagePoint project(const Vec3& p) const;
  double depth(const Vec3& p) const;
  // Inverse of (project, depth).
  Vec3 unproject(const ImagePoint& q, double depth01) const;
};

// Canonical view over `box` at `pixels_per_unit`; sizes are rounded and at least 1.
OrthoView canonical_view(ViewKind kind, const Aabb& box, double pixels_per_unit);
// Same, with explicit pixel dimensions (dynamic per-view image sizes).
OrthoView canonical_view_sized(ViewKind kind, const Aabb& box, int width, int height);
// Camera looking along `axis` at a sphere of `radius` about `center`, square image.
OrthoView sphere_view(const Vec3& axis, const Vec3& center, double radius, int resolution);

}  // namespace vrecon::geometry
