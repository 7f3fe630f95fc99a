#include "vrecon/geometry/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vrecon/core/error.hpp"
#include "vrecon/img/ops.hpp"

namespace vrecon::geometry {
namespace {

struct P2 {
  double u, v;
};

double edge(const P2& a, const P2& b, const P2& p) {
  return (b.u - a.u) * (p.v - a.v) - (b.v - a.v) * (p.u - a.u);
}

// Screen v grows downward; with positive edge() orientation a top edge runs
// rightwards horizontally and a left edge runs upwards.
bool top_left(const P2& a, const P2& b) {
  return (a.v == b.v && b.u > a.u) || (b.v < a.v);
}

}  // namespace

RenderResult render_view(const TriangleMesh& mesh, const OrthoView& view,
                         const std::vector<std::uint8_t>* skip) {
  if (mesh.empty()) throw Error(ErrorCode::EmptyInput, "cannot render an empty mesh");
  const int w = view.width, h = view.height;
  RenderResult out{img::GrayImage(w, h, 1.0f), img::VectorImage(w, h), img::GrayImage(w, h, 0.0f),
                   std::vector<std::int32_t>(static_cast<std::size_t>(w) * h, -1)};
  std::vector<double> zbuf(static_cast<std::size_t>(w) * h, std::numeric_limits<double>::infinity());
  const Vec3 toward_camera = -view.axis;

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (skip && (*skip)[t]) continue;
    const auto& tri = mesh.triangles[t];
    P2 p[3];
    double d[3];
    for (int k = 0; k < 3; ++k) {
      const Vec3& x = mesh.vertices[tri[k]];
      const ImagePoint q = view.project(x);
      p[k] = {q.u, q.v};
      d[k] = view.depth(x);
    }
    double area = edge(p[0], p[1], p[2]);
    if (area == 0.0) continue;
    if (area < 0) {
      std::swap(p[1], p[2]);
      std::swap(d[1], d[2]);
      area = -area;
    }
    Vec3 n = triangle_normal(mesh, t);
    if (dot(n, toward_camera) < 0) n = -n;
    const int x0 = std::max(0, static_cast<int>(std::ceil(std::min({p[0].u, p[1].u, p[2].u}))));
    const int x1 = std::min(w - 1, static_cast<int>(std::floor(std::max({p[0].u, p[1].u, p[2].u}))));
    const int y0 = std::max(0, static_cast<int>(std::ceil(std::min({p[0].v, p[1].v, p[2].v}))));
    const int y1 = std::min(h - 1, static_cast<int>(std::floor(std::max({p[0].v, p[1].v, p[2].v}))));
    const bool tl0 = top_left(p[1], p[2]), tl1 = top_left(p[2], p[0]), tl2 = top_left(p[0], p[1]);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const P2 s{static_cast<double>(x), static_cast<double>(y)};
        const double w0 = edge(p[1], p[2], s), w1 = edge(p[2], p[0], s), w2 = edge(p[0], p[1], s);
        if (w0 < 0 || w1 < 0 || w2 < 0) continue;
        if ((w0 == 0 && !tl0) || (w1 == 0 && !tl1) || (w2 == 0 && !tl2)) continue;
        const double z = (w0 * d[0] + w1 * d[1] + w2 * d[2]) / area;
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (z < zbuf[i]) {
          zbuf[i] = z;
          out.triangle[i] = static_cast<std::int32_t>(t);
          out.normal.data[i] = {static_cast<float>(n.x), static_cast<float>(n.y), static_cast<float>(n.z)};
        }
      }
    }
  }
  for (std::size_t i = 0; i < zbuf.size(); ++i) {
    if (out.triangle[i] < 0) continue;
    out.mask.data[i] = 1.0f;
    out.depth.data[i] = static_cast<float>(std::clamp(zbuf[i], 0.0, 1.0));
  }
  return out;
}

namespace {

// Covered normals bleed into the background so the silhouette itself is not
// mistaken for a crease; outline pixels come from the coverage test instead.
img::VectorImage padded_normals(const RenderResult& r) {
  const int w = r.normal.width + 2, h = r.normal.height + 2;
  img::VectorImage out(w, h);
  std::vector<std::uint8_t> known(static_cast<std::size_t>(w) * h, 0);
  for (int y = 0; y < r.normal.height; ++y)
    for (int x = 0; x < r.normal.width; ++x)
      if (r.mask.at(x, y) > 0.5f) {
        out.at(x + 1, y + 1) = r.normal.at(x, y);
        known[static_cast<std::size_t>(y + 1) * w + x + 1] = 1;
      }
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<std::uint8_t> next = known;
    img::VectorImage filled = out;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (known[static_cast<std::size_t>(y) * w + x]) continue;
        img::Vec3f sum{0, 0, 0};
        int n = 0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int xx = x + dx, yy = y + dy;
            if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
            if (!known[static_cast<std::size_t>(yy) * w + xx]) continue;
            for (int c = 0; c < 3; ++c) sum[c] += out.at(xx, yy)[c];
            ++n;
          }
        if (n == 0) continue;
        for (int c = 0; c < 3; ++c) sum[c] /= static_cast<float>(n);
        filled.at(x, y) = sum;
        next[static_cast<std::size_t>(y) * w + x] = 1;
      }
    out = std::move(filled);
    known = std::move(next);
  }
  return out;
}

}  // namespace

img::GrayImage crease_strength(const RenderResult& r) {
  const img::GrayImage padded = img::sobel_magnitude(padded_normals(r));
  img::GrayImage out(r.normal.width, r.normal.height);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x)
      out.at(x, y) = r.mask.at(x, y) > 0.5f ? padded.at(x + 1, y + 1) : 0.0f;
  return out;
}

}  // namespace vrecon::geometry
