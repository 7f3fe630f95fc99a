#include "vrecon/views/extract.hpp"

#include <algorithm>
#include <tuple>

#include "vrecon/img/ops.hpp"

namespace vrecon::views {
namespace {

using img::GrayImage;

struct Region {
  int x0, y0, x1, y1;  // inclusive
};

bool row_blank(const GrayImage& im, int y, int x0, int x1, float t) {
  for (int x = x0; x <= x1; ++x)
    if (im.at(x, y) < t) return false;
  return true;
}
bool col_blank(const GrayImage& im, int x, int y0, int y1, float t) {
  for (int y = y0; y <= y1; ++y)
    if (im.at(x, y) < t) return false;
  return true;
}

// Shrinks to the non-blank content; false when the region is entirely blank.
bool tighten(const GrayImage& im, Region& r, float t) {
  while (r.y0 <= r.y1 && row_blank(im, r.y0, r.x0, r.x1, t)) ++r.y0;
  while (r.y1 >= r.y0 && row_blank(im, r.y1, r.x0, r.x1, t)) --r.y1;
  if (r.y0 > r.y1) return false;
  while (r.x0 <= r.x1 && col_blank(im, r.x0, r.y0, r.y1, t)) ++r.x0;
  while (r.x1 >= r.x0 && col_blank(im, r.x1, r.y0, r.y1, t)) --r.x1;
  return r.x0 <= r.x1;
}

struct Split {
  int width = 0;
  bool rows = true;
  int start = 0, end = 0;  // blank run [start, end]
};

Split widest_run(const GrayImage& im, const Region& r, float t) {
  Split best;
  auto scan = [&](bool rows) {
    const int lo = rows ? r.y0 : r.x0, hi = rows ? r.y1 : r.x1;
    int run_start = -1;
    for (int i = lo; i <= hi; ++i) {
      const bool blank = rows ? row_blank(im, i, r.x0, r.x1, t) : col_blank(im, i, r.y0, r.y1, t);
      if (blank && run_start < 0) run_start = i;
      if (!blank && run_start >= 0) {
        const int width = i - run_start;
        if (width > best.width) best = {width, rows, run_start, i - 1};
        run_start = -1;
      }
    }
  };
  scan(true);
  scan(false);
  return best;
}

BoundingBox to_box(const Region& r) { return {r.x0, r.y0, r.x1 - r.x0 + 1, r.y1 - r.y0 + 1}; }

bool box_order(const BoundingBox& a, const BoundingBox& b) {
  return std::tie(a.y, a.x, a.w, a.h) < std::tie(b.y, b.x, b.w, b.h);
}

}  // namespace

std::vector<BoundingBox> line_cut(const GrayImage& im, int expected, float blank_threshold) {
  if (im.empty() || expected < 1) throw Error(ErrorCode::Invalid, "line_cut needs an image and expected >= 1");
  Region all{0, 0, im.width - 1, im.height - 1};
  if (!tighten(im, all, blank_threshold)) throw Error(ErrorCode::CutFailed, "image is blank");
  std::vector<Region> leaves{all};
  while (static_cast<int>(leaves.size()) < expected) {
    int best_leaf = -1;
    Split best;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const Split s = widest_run(im, leaves[i], blank_threshold);
      if (s.width > best.width) {
        best = s;
        best_leaf = static_cast<int>(i);
      }
    }
    if (best_leaf < 0)
      throw Error(ErrorCode::CutFailed, "no blank separator left after " +
                                            std::to_string(leaves.size()) + " regions");
    Region a = leaves[best_leaf], b = leaves[best_leaf];
    if (best.rows) { a.y1 = best.start - 1; b.y0 = best.end + 1; }
    else { a.x1 = best.start - 1; b.x0 = best.end + 1; }
    tighten(im, a, blank_threshold);
    tighten(im, b, blank_threshold);
    leaves[best_leaf] = a;
    leaves.insert(leaves.begin() + best_leaf + 1, b);
  }
  std::vector<BoundingBox> out;
  for (const auto& r : leaves) out.push_back(to_box(r));
  std::sort(out.begin(), out.end(), box_order);
  return out;
}

std::vector<BoundingBox> contour_cut(const GrayImage& im, std::int64_t min_area, float ink_threshold) {
  if (im.empty()) return {};
  const GrayImage solid = img::silhouette_from_drawing(im, ink_threshold);
  const auto labels = img::connected_components(solid, 0.5f);
  std::vector<BoundingBox> out;
  for (const auto& r : img::component_bounds(labels))
    if (r.area() >= min_area) out.push_back({r.x, r.y, r.w, r.h});
  std::stable_sort(out.begin(), out.end(), [](const BoundingBox& a, const BoundingBox& b) {
    return a.area() > b.area() || (a.area() == b.area() && box_order(a, b));
  });
  return out;
}

ViewSet identify_views(std::vector<BoundingBox> boxes) {
  if (boxes.size() < 4)
    throw Error(ErrorCode::IdentificationFailed,
                "need at least 4 views, found " + std::to_string(boxes.size()));
  std::sort(boxes.begin(), boxes.end(), [](const BoundingBox& a, const BoundingBox& b) {
    return a.area() > b.area() || (a.area() == b.area() && box_order(a, b));
  });
  if (boxes.size() > 4 && boxes[3].area() == boxes[4].area())
    throw TieUnresolvedError("fourth and fifth largest views have equal area",
                             {boxes.begin(), boxes.end()});
  boxes.resize(4);
  std::sort(boxes.begin(), boxes.end(), [](const BoundingBox& a, const BoundingBox& b) {
    return a.w > b.w || (a.w == b.w && box_order(a, b));
  });
  if (boxes[1].w == boxes[2].w)
    throw TieUnresolvedError("cannot tell side/top from front/back: equal widths", boxes);
  if (boxes[0].h == boxes[1].h)
    throw TieUnresolvedError("side and top candidates have equal height", boxes);
  ViewSet set;
  const bool first_is_top = boxes[0].h > boxes[1].h;
  set.views.resize(4);
  set.views[0].box = first_is_top ? boxes[0] : boxes[1];
  set.views[0].label = {Kind::Top, Facing::Unknown};
  set.views[1].box = first_is_top ? boxes[1] : boxes[0];
  set.views[1].label = {Kind::Side, Facing::Unknown};
  std::vector<BoundingBox> rest{boxes[2], boxes[3]};
  std::sort(rest.begin(), rest.end(), [](const BoundingBox& a, const BoundingBox& b) {
    return std::tie(a.x, a.y, a.w, a.h) < std::tie(b.x, b.y, b.w, b.h);
  });
  set.views[2].box = rest[0];
  set.views[3].box = rest[1];
  return set;
}

void attach_images(ViewSet& set, const GrayImage& source) {
  set.source_width = source.width;
  set.source_height = source.height;
  for (auto& v : set.views) v.image = img::crop(source, {v.box.x, v.box.y, v.box.w, v.box.h});
}

ExtractResult extract_views(const GrayImage& im, int expected) {
  ExtractResult result;
  std::vector<BoundingBox> boxes;
  try {
    boxes = line_cut(im, expected);
    result.method = "line";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::CutFailed) throw;
  }
  if (static_cast<int>(boxes.size()) != expected) {
    // Ignore specks: anything below 0.1% of the image area.
    const std::int64_t min_area = std::max<std::int64_t>(4, static_cast<std::int64_t>(im.width) * im.height / 1000);
    boxes = contour_cut(im, min_area);
    result.method = "contour";
  }
  result.candidates = boxes;
  if (static_cast<int>(boxes.size()) < expected) {
    result.status = ExtractStatus::ManualRequired;
    result.method.clear();
    result.message = "automatic cutting found " + std::to_string(boxes.size()) +
                     " views; draw the boxes manually";
    return result;
  }
  try {
    result.views = identify_views(boxes);
    attach_images(result.views, im);
    result.status = ExtractStatus::Ok;
  } catch (const TieUnresolvedError& e) {
    result.status = ExtractStatus::TieUnresolved;
    result.candidates = e.candidates();
    result.message = e.what();
  }
  return result;
}

}  // namespace vrecon::views
