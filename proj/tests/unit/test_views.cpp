#include <doctest.h>

#include <algorithm>
#include <random>

#include "vrecon/img/ops.hpp"
#include "vrecon/recon/shapes.hpp"
#include "vrecon/views/augment.hpp"
#include "vrecon/views/extract.hpp"
#include "vrecon/views/json.hpp"
#include "vrecon/views/synth.hpp"

using namespace vrecon;
using namespace vrecon::views;
using img::GrayImage;

namespace {

void fill(GrayImage& im, const BoundingBox& b, float v = 0.0f) {
  for (int y = b.y; y < b.y + b.h; ++y)
    for (int x = b.x; x < b.x + b.w; ++x) im.at(x, y) = v;
}

bool near_box(const BoundingBox& a, const BoundingBox& b, int tol = 1) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol &&
         std::abs(a.x + a.w - b.x - b.w) <= tol && std::abs(a.y + a.h - b.y - b.h) <= tol;
}

bool matches_one(const BoundingBox& got, const std::vector<BoundingBox>& want) {
  return std::any_of(want.begin(), want.end(), [&](const BoundingBox& w) { return near_box(got, w); });
}

const ViewEntry* with_kind(const ViewSet& s, Kind k) {
  for (const auto& v : s.views)
    if (v.label.kind == k) return &v;
  return nullptr;
}

int count_kind(const ViewSet& s, Kind k) {
  return static_cast<int>(std::count_if(s.views.begin(), s.views.end(),
                                        [&](const ViewEntry& v) { return v.label.kind == k; }));
}

nlohmann::json good_descriptor() {
  return nlohmann::json::parse(R"({
    "source_size": {"width": 200, "height": 100},
    "views": [
      {"box": {"x": 0, "y": 0, "w": 80, "h": 40}, "kind": "side", "facing": "positive"},
      {"box": {"x": 0, "y": 50, "w": 80, "h": 40}, "kind": "top", "facing": "negative"},
      {"box": {"x": 100, "y": 0, "w": 40, "h": 40}, "kind": "front"},
      {"box": {"x": 100, "y": 50, "w": 40, "h": 40}, "kind": "back", "facing": "unknown"}
    ]})");
}

}  // namespace

TEST_SUITE("views") {
  TEST_CASE("line cut finds a 2x2 layout") {
    GrayImage im(120, 90, 1.0f);
    const std::vector<BoundingBox> rects{{5, 6, 40, 30}, {55, 6, 50, 20}, {5, 50, 44, 30}, {60, 45, 30, 40}};
    for (const auto& r : rects) fill(im, r, 0.1f);
    const auto boxes = line_cut(im, 4);
    REQUIRE(boxes.size() == 4);
    for (const auto& b : boxes) CHECK(matches_one(b, rects));
  }

  TEST_CASE("line cut failures") {
    CHECK_THROWS_AS(line_cut(GrayImage(50, 50, 1.0f), 4), Error);
    GrayImage solid(50, 50, 1.0f);
    fill(solid, {10, 10, 20, 20});
    try {
      line_cut(solid, 4);
      FAIL("expected CutFailed");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CutFailed);
    }
    CHECK(line_cut(solid, 1).size() == 1);
  }

  TEST_CASE("contour cut") {
    GrayImage im(100, 100, 1.0f);
    fill(im, {2, 2, 20, 20});
    fill(im, {30, 2, 25, 15});
    fill(im, {60, 2, 30, 30});
    fill(im, {2, 40, 10, 40});
    fill(im, {50, 60, 2, 2});  // decal below the area cut
    const auto boxes = contour_cut(im, 20);
    REQUIRE(boxes.size() == 4);
    for (std::size_t i = 1; i < boxes.size(); ++i) CHECK(boxes[i - 1].area() >= boxes[i].area());
    CHECK(boxes[0] == BoundingBox{60, 2, 30, 30});

    // an L and a square tucked into its bounding box: two outlines
    GrayImage l(40, 40, 1.0f);
    fill(l, {0, 0, 4, 40});
    fill(l, {0, 36, 40, 4});
    fill(l, {10, 5, 10, 10});
    const auto two = contour_cut(l, 1);
    CHECK(two.size() == 2);
    const auto labels = img::connected_components(img::invert(l), 0.5f);
    CHECK(img::component_bounds(labels).size() == two.size());

    // a closed outline counts as one region, its hole included
    GrayImage ring(30, 30, 1.0f);
    fill(ring, {5, 5, 20, 20});
    fill(ring, {7, 7, 16, 16}, 1.0f);
    const auto r = contour_cut(ring, 1);
    REQUIRE(r.size() == 1);
    CHECK(r[0] == BoundingBox{5, 5, 20, 20});

    CHECK(contour_cut(GrayImage(30, 30, 1.0f), 1).empty());
  }

  TEST_CASE("identify views") {
    std::vector<BoundingBox> boxes{{0, 0, 400, 120}, {500, 0, 140, 118}, {0, 200, 400, 160},
                                   {500, 200, 140, 120}, {700, 0, 5, 5}, {700, 10, 3, 3}};
    const auto set = identify_views(boxes);
    REQUIRE(set.views.size() == 4);
    CHECK(with_kind(set, Kind::Top)->box == BoundingBox{0, 200, 400, 160});
    CHECK(with_kind(set, Kind::Side)->box == BoundingBox{0, 0, 400, 120});
    CHECK(count_kind(set, Kind::Unresolved) == 2);
    for (const auto& v : set.views) CHECK(v.label.facing == Facing::Unknown);

    // a pure function of the multiset
    std::mt19937 g(5);
    for (int i = 0; i < 20; ++i) {
      std::shuffle(boxes.begin(), boxes.end(), g);
      const auto again = identify_views(boxes);
      for (std::size_t k = 0; k < 4; ++k) {
        CHECK(again.views[k].box == set.views[k].box);
        CHECK(again.views[k].label == set.views[k].label);
      }
    }

    try {
      identify_views({{0, 0, 100, 50}, {0, 60, 100, 40}, {200, 0, 100, 30}, {200, 60, 100, 20}});
      FAIL("expected a tie");
    } catch (const TieUnresolvedError& e) {
      CHECK(e.code() == ErrorCode::TieUnresolved);
      CHECK(e.candidates().size() == 4);
    }
    try {
      identify_views({{0, 0, 10, 10}, {0, 0, 20, 10}, {0, 0, 30, 10}});
      FAIL("expected IdentificationFailed");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IdentificationFailed);
    }
  }

  TEST_CASE("synthetic blueprints extract back to their layout") {
    for (const auto& mesh : {recon::car_proxy(48), recon::cube_mesh(1.0, 2)}) {
      const auto bp = synth_blueprint(mesh, {64, 6, 0.05});
      const auto res = extract_views(bp.sheet);
      const bool is_cube = bp.views.views[0].box.w == bp.views.views[0].box.h;
      if (is_cube) {
        // every view of a cube is the same square: a tie for the UI
        CHECK(res.status == ExtractStatus::TieUnresolved);
        CHECK(res.candidates.size() == 4);
        continue;
      }
      REQUIRE(res.status == ExtractStatus::Ok);
      CHECK(res.method == "line");
      std::vector<BoundingBox> truth;
      for (const auto& v : bp.views.views) truth.push_back(v.box);
      for (const auto& v : res.views.views) CHECK(matches_one(v.box, truth));
      CHECK(near_box(with_kind(res.views, Kind::Top)->box, bp.views.get(Kind::Top).box));
      CHECK(near_box(with_kind(res.views, Kind::Side)->box, bp.views.get(Kind::Side).box));
      for (const auto& v : res.views.views) {
        CHECK(v.image.width == v.box.w);
        CHECK(v.image.height == v.box.h);
      }
    }
  }

  TEST_CASE("extract falls back to contours, then to the user") {
    // pinwheel: every row and column crosses a view, so line cutting cannot split
    GrayImage im(210, 210, 1.0f);
    fill(im, {0, 0, 130, 60});
    fill(im, {140, 0, 60, 120});
    fill(im, {75, 140, 125, 55});
    fill(im, {0, 70, 60, 125});
    const auto res = extract_views(im);
    CHECK(res.status == ExtractStatus::Ok);
    CHECK(res.method == "contour");
    CHECK(with_kind(res.views, Kind::Top)->box == BoundingBox{0, 0, 130, 60});
    CHECK(with_kind(res.views, Kind::Side)->box == BoundingBox{75, 140, 125, 55});

    const auto blank = extract_views(GrayImage(64, 64, 1.0f));
    CHECK(blank.status == ExtractStatus::ManualRequired);
  }

  TEST_CASE("synth drawings") {
    const auto cube = synth_blueprint(recon::cube_mesh(1.0, 2), {40, 4, 0.05});
    for (const auto& v : cube.views.views) {
      const auto& im = v.image;
      for (int y = 0; y < im.height; ++y)
        for (int x = 0; x < im.width; ++x) {
          const bool border = x == 0 || y == 0 || x == im.width - 1 || y == im.height - 1;
          if (border) CHECK(im.at(x, y) < 0.5f);
          else CHECK(im.at(x, y) == 1.0f);
        }
    }
    CHECK(!cube.interior_sheet);

    // groups split at the mid plane along X: one extra vertical line in side and top
    const auto split = synth_blueprint(recon::cube_mesh(1.0, 2, true), {40, 4, 0.05});
    for (const auto& v : split.views.views) {
      const auto& im = v.image;
      std::vector<int> dark_cols;
      for (int x = 1; x < im.width - 1; ++x) {
        int dark = 0;
        for (int y = 1; y < im.height - 1; ++y) dark += im.at(x, y) < 0.5f;
        if (dark == im.height - 2) dark_cols.push_back(x);
        else CHECK(dark == 0);
      }
      const bool affected = v.label.kind == Kind::Side || v.label.kind == Kind::Top;
      if (affected) {
        CHECK(!dark_cols.empty());
        CHECK(dark_cols.size() <= 2);
        for (int c : dark_cols) CHECK(std::abs(c - im.width / 2) <= 1);
      } else {
        CHECK(dark_cols.empty());
      }
    }

    // sphere: ink on the silhouette, interior close to blank
    const auto sphere = synth_blueprint(recon::icosphere(0.5, 6), {80, 4, 0.05});
    const auto& f = sphere.views.get(Kind::Front);
    double rim = 0, inner = 0;
    int n_rim = 0, n_inner = 0;
    const double c = (f.image.width - 1) / 2.0;
    for (int y = 0; y < f.image.height; ++y)
      for (int x = 0; x < f.image.width; ++x) {
        if (f.mask->at(x, y) < 0.5f) continue;
        const double r = std::hypot(x - c, y - c) / (f.image.width / 2.0);
        const double ink = 1.0 - f.image.at(x, y);
        const auto& m = *f.mask;
        const bool outline = x == 0 || y == 0 || x + 1 == m.width || y + 1 == m.height ||
                             m.at(x - 1, y) < 0.5f || m.at(x + 1, y) < 0.5f ||
                             m.at(x, y - 1) < 0.5f || m.at(x, y + 1) < 0.5f;
        if (outline) rim += ink, ++n_rim;
        else if (r < 0.7) inner += ink, ++n_inner;
      }
    CHECK(inner / n_inner < 0.1 * (rim / n_rim));

    CHECK_THROWS_AS(synth_blueprint(geometry::TriangleMesh{}), Error);
  }

  TEST_CASE("glass groups yield an interior drawing") {
    auto mesh = recon::cube_mesh(1.0, 2, true);
    mesh.group_names[1] = "glass";
    const auto bp = synth_blueprint(mesh, {40, 4, 0.05});
    REQUIRE(bp.interior_sheet);
    CHECK(bp.interior_sheet->width == bp.sheet.width);
    CHECK(*bp.interior_sheet != bp.sheet);
    for (const auto& v : bp.views.views) CHECK(v.interior);
  }

  TEST_CASE("augment") {
    const auto bp = synth_blueprint(recon::car_proxy(40), {48, 4, 0.05});
    const ViewSet& base = bp.views;

    const auto same = augment(base, {});
    for (std::size_t i = 0; i < 4; ++i) CHECK(same.views[i].image == base.views[i].image);

    AugmentConfig cfg{0.1, 0.3, 3, false, 77};
    const auto a = augment(base, cfg), b = augment(base, cfg);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(a.views[i].image == b.views[i].image);
      CHECK(a.views[i].box == base.views[i].box);
      CHECK(a.views[i].label == base.views[i].label);
    }
    cfg.seed = 78;
    CHECK(augment(base, cfg).views[0].image != a.views[0].image);

    const AugmentConfig noise{0.1, 0.0, 4, false, 9};
    const auto& src = base.views[0].image;
    GrayImage lines;
    const auto out = augment_image(src, noise, 0, &lines);
    int changed = 0;
    for (std::size_t i = 0; i < src.data.size(); ++i) {
      if (lines.data[i] > 0) continue;
      CHECK(std::abs(out.data[i] - src.data[i]) <= 0.1f + 1e-6f);
      changed += out.data[i] != src.data[i];
    }
    CHECK(changed > 0);

    CHECK_THROWS_AS(augment(base, {1.5, 0, 0, false, 0}), Error);
    CHECK_THROWS_AS(augment(base, {0, 0, -1, false, 0}), Error);
  }

  TEST_CASE("descriptor json") {
    const auto doc = good_descriptor();
    CHECK(validate_descriptor(doc, 200, 100).empty());
    const auto set = viewset_from_json(doc);
    CHECK(set.source_width == 200);
    CHECK(set.views[1].label == ViewLabel{Kind::Top, Facing::NegativeAxis});
    CHECK(to_json(set) == nlohmann::json::parse(R"({
      "source_size": {"width": 200, "height": 100},
      "views": [
        {"box": {"x": 0, "y": 0, "w": 80, "h": 40}, "kind": "side", "facing": "positive"},
        {"box": {"x": 0, "y": 50, "w": 80, "h": 40}, "kind": "top", "facing": "negative"},
        {"box": {"x": 100, "y": 0, "w": 40, "h": 40}, "kind": "front", "facing": "unknown"},
        {"box": {"x": 100, "y": 50, "w": 40, "h": 40}, "kind": "back", "facing": "unknown"}]})"));

    auto fields = [](const std::vector<FieldError>& errs) {
      std::vector<std::string> f;
      for (const auto& e : errs) f.push_back(e.field);
      return f;
    };
    auto dup = doc;
    dup["views"][3]["kind"] = "front";
    CHECK(fields(validate_descriptor(dup, 200, 100)) == std::vector<std::string>{"views[3].kind"});
    auto outside = doc;
    outside["views"][2]["box"]["x"] = 170;
    CHECK(fields(validate_descriptor(outside, 200, 100)) == std::vector<std::string>{"views[2].box"});
    auto facing = doc;
    facing["views"][0]["facing"] = "unknown";
    CHECK(fields(validate_descriptor(facing, 200, 100)) == std::vector<std::string>{"views[0].facing"});
    auto three = doc;
    three["views"].erase(3);
    CHECK(fields(validate_descriptor(three, 200, 100)) == std::vector<std::string>{"views"});
    auto bad_kind = doc;
    bad_kind["views"][1]["kind"] = "roof";
    CHECK(fields(validate_descriptor(bad_kind, 200, 100)) == std::vector<std::string>{"views[1].kind"});
    auto bad_box = doc;
    bad_box["views"][1]["box"]["w"] = "wide";
    CHECK(fields(validate_descriptor(bad_box, 200, 100)) == std::vector<std::string>{"views[1].box"});
    CHECK(!validate_descriptor(nlohmann::json::array(), 1, 1).empty());
    CHECK_THROWS_AS(viewset_from_json(bad_kind), Error);
  }

  TEST_CASE("finalized sets and orientation") {
    auto bp = synth_blueprint(recon::car_proxy(40), {48, 4, 0.05});
    CHECK(bp.views.finalized());
    const auto side = bp.views.get(Kind::Side).image;
    bp.views.get(Kind::Side).label.facing = Facing::NegativeAxis;
    bp.views.get(Kind::Side).image = img::flip_horizontal(side);
    CHECK(oriented_image(bp.views, Kind::Side) == side);
    bp.views.get(Kind::Top).label.facing = Facing::Unknown;
    CHECK(!bp.views.finalized());
    bp.views.get(Kind::Top).label = {Kind::Side, Facing::PositiveAxis};
    CHECK(!bp.views.finalized());
  }
}
