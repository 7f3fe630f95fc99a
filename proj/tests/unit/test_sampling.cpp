#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "vrecon/core/binary_io.hpp"
#include "vrecon/core/random.hpp"
#include "vrecon/geometry/mesh.hpp"
#include "vrecon/geometry/parity.hpp"
#include "vrecon/recon/shapes.hpp"
#include "vrecon/sampling/config.hpp"
#include "vrecon/sampling/hull.hpp"
#include "vrecon/sampling/samples.hpp"
#include "vrecon/sampling/scan.hpp"
#include "vrecon/sampling/weights.hpp"
#include "vrecon/views/synth.hpp"

using namespace vrecon;
using namespace vrecon::sampling;

namespace {

VoxelGrid hull_of(const geometry::TriangleMesh& mesh, int res) {
  return visual_hull(views::synth_blueprint(mesh, {res, 4, 0.05}).views, res);
}

// Thickness exactly as described: per axis, split by the sign of that normal
// component and search the opposite side; maximum over axes.
std::vector<double> thickness_oracle(const SurfaceScan& s, const SamplerConfig& cfg) {
  const double cos_t = std::cos(cfg.thickness_angle_threshold * std::numbers::pi / 180.0);
  std::vector<double> out(s.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    double best = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double si = a == 0 ? s.normals[i].x : a == 1 ? s.normals[i].y : s.normals[i].z;
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < s.size(); ++j) {
        const double sj = a == 0 ? s.normals[j].x : a == 1 ? s.normals[j].y : s.normals[j].z;
        if ((si >= 0) == (sj >= 0)) continue;
        if (dot(s.normals[i], s.normals[j]) >= cos_t) continue;
        d = std::min(d, norm(s.points[j] - s.points[i]));
      }
      if (std::isfinite(d)) best = std::max(best, 1.0 / std::max(d, cfg.dist_floor));
    }
    out[i] = std::min(best, cfg.thickness_clip) / cfg.thickness_clip;
  }
  return out;
}

SurfaceScan subset(const SurfaceScan& s, std::size_t stride) {
  SurfaceScan out;
  for (std::size_t i = 0; i < s.size(); i += stride) {
    out.points.push_back(s.points[i]);
    out.normals.push_back(s.normals[i]);
    out.edge.push_back(s.edge[i]);
    out.rel_height.push_back(s.rel_height[i]);
  }
  return out;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

}  // namespace

TEST_SUITE("sampling") {
  TEST_CASE("w_normal") {
    CHECK(w_normal(0.03, -1.0) == 1.0);
    CHECK(w_normal(0.20, -1.0) == 0.20);
    CHECK(w_normal(0.30, 0.0) == 1.0);
    for (int i = 0; i <= 100; ++i)
      for (int j = 0; j <= 200; ++j) {
        const double h = i / 100.0, n = -1.0 + j / 100.0;
        const double want = (h < 0.05 || h > 0.5 || n > -0.95) ? 1.0 : h;
        CHECK(w_normal(h, n) == want);
      }
  }

  TEST_CASE("tsdf map") {
    CHECK(tsdf_map(0.0, 0.1) == 0.5);
    CHECK(tsdf_map(0.1, 0.1) == 0.0);
    CHECK(tsdf_map(0.5, 0.1) == 0.0);
    CHECK(tsdf_map(-0.1, 0.1) == 1.0);
    CHECK(tsdf_map(-3.0, 0.1) == 1.0);
    double prev = 2.0;
    for (int i = -300; i <= 300; ++i) {
      const double v = tsdf_map(i * 1e-3, 0.1);
      CHECK(v <= prev);
      prev = v;
    }
  }

  TEST_CASE("cube scan from the six axes") {
    const auto cube = recon::cube_mesh(1.0, 2);
    const auto scan = scan_mesh(cube, 6, 64);
    REQUIRE(scan.size() > 0);
    for (std::size_t i = 0; i < scan.size(); ++i) {
      const auto& p = scan.points[i];
      const double m = std::max({std::abs(p.x), std::abs(p.y), std::abs(p.z)});
      CHECK(m == doctest::Approx(0.5).epsilon(1e-4));
      const auto& n = scan.normals[i];
      CHECK(std::abs(n.x) + std::abs(n.y) + std::abs(n.z) == doctest::Approx(1.0));
      CHECK(std::max({std::abs(n.x), std::abs(n.y), std::abs(n.z)}) == doctest::Approx(1.0));
      CHECK((scan.rel_height[i] >= 0 && scan.rel_height[i] <= 1));
      CHECK((scan.edge[i] >= 0 && scan.edge[i] <= 1));
    }
    CHECK_THROWS_AS(scan_mesh(cube, 5, 64), Error);
    CHECK_THROWS_AS(scan_mesh(geometry::TriangleMesh{}, 6, 64), Error);
  }

  TEST_CASE("cube scan edges sit on cube edges") {
    const auto scan = scan_mesh(recon::cube_mesh(1.0, 2), 18, 96);
    int high = 0;
    for (std::size_t i = 0; i < scan.size(); ++i) {
      const auto& p = scan.points[i];
      // distance to the nearest cube edge within the point's face
      std::array<double, 3> a{std::abs(p.x), std::abs(p.y), std::abs(p.z)};
      std::sort(a.begin(), a.end());
      const double to_edge = 0.5 - a[1];
      if (scan.edge[i] > 0.5f) {
        ++high;
        CHECK(to_edge <= 2 * scan.spacing + 1e-9);
      }
      if (to_edge > 3 * scan.spacing) CHECK(scan.edge[i] < 1e-3f);
    }
    CHECK(high > 0);
  }

  TEST_CASE("sphere scan and signed distance") {
    const auto sphere = recon::icosphere(0.5, 5);
    const auto scan = scan_mesh(sphere, 18, 128);
    for (const auto& p : scan.points) CHECK(std::abs(norm(p) - 0.5) <= 1e-3);
    CHECK(signed_distance(scan, {0, 0, 0}) == doctest::Approx(-0.5).epsilon(0.04));
    const Vec3 far{0.6, 0.7, -0.4};
    const double want = norm(far) - 0.5;
    CHECK(signed_distance(scan, far) > 0);
    CHECK(std::abs(signed_distance(scan, far) - want) <= 0.02 * want);
    for (std::size_t i = 0; i < scan.size(); i += 97) CHECK(std::abs(signed_distance(scan, scan.points[i])) <= scan.spacing);
  }

  TEST_CASE("sign agrees with ray parity on watertight shapes") {
    const std::vector<geometry::TriangleMesh> shapes{recon::cube_mesh(1.0, 2), recon::icosphere(0.5, 4),
                                                     recon::torus(0.3, 0.12, 48, 24), recon::car_proxy(64)};
    for (const auto& mesh : shapes) {
      const auto scan = scan_mesh(mesh, 18, 128);
      const auto box = mesh.bounds().inflated(0.05);
      const geometry::ParityScanner parity(mesh);
      Rng rng(4);
      int agree = 0;
      const int n = 10000;
      for (int i = 0; i < n; ++i) {
        const Vec3 e = box.extent();
        const Vec3 p = box.lo + Vec3{uniform01(rng) * e.x, uniform01(rng) * e.y, uniform01(rng) * e.z};
        agree += (signed_distance(scan, p) < 0) == parity.inside(p);
      }
      CHECK(agree >= 0.99 * n);
    }
  }

  TEST_CASE("visual hull of a box is the box") {
    const Vec3 lo{-0.5, -0.2, -0.15}, hi{0.5, 0.2, 0.15};
    const auto hull = hull_of(recon::box_mesh(lo, hi), 64);
    const auto b = hull.occupied_bounds();
    CHECK(std::abs(b.lo.x - lo.x) <= hull.spacing);
    CHECK(std::abs(b.lo.y - lo.y) <= hull.spacing);
    CHECK(std::abs(b.lo.z - lo.z) <= hull.spacing);
    CHECK(std::abs(b.hi.x - hi.x) <= hull.spacing);
    CHECK(std::abs(b.hi.y - hi.y) <= hull.spacing);
    CHECK(std::abs(b.hi.z - hi.z) <= hull.spacing);
    // solid: every voxel inside the box shrunk by one voxel is occupied
    for (int k = 0; k < hull.nz; ++k)
      for (int j = 0; j < hull.ny; ++j)
        for (int i = 0; i < hull.nx; ++i) {
          const Vec3 c = hull.center(i, j, k);
          const bool deep = c.x > lo.x + hull.spacing && c.x < hi.x - hull.spacing && c.y > lo.y + hull.spacing &&
                            c.y < hi.y - hull.spacing && c.z > lo.z + hull.spacing && c.z < hi.z - hull.spacing;
          if (deep) CHECK(hull.at(i, j, k));
        }
  }

  TEST_CASE("visual hull of a cylinder") {
    const double r = 0.2;
    auto cyl = [&](const Vec3& p) {
      const double radial = std::hypot(p.y, p.z) - r, axial = std::abs(p.x) - 0.5;
      return std::max(radial, axial);
    };
    const auto mesh = geometry::normalize_mesh(recon::mesh_from_sdf(cyl, {{-0.5, -r, -r}, {0.5, r, r}}, 96)).mesh;
    const auto hull = hull_of(mesh, 64);
    int wrong = 0;
    for (int k = 0; k < hull.nz; ++k)
      for (int j = 0; j < hull.ny; ++j)
        for (int i = 0; i < hull.nx; ++i) {
          const double d = cyl(hull.center(i, j, k));
          if (std::abs(d) <= hull.spacing * std::sqrt(3.0)) continue;
          wrong += hull.at(i, j, k) != (d < 0);
        }
    CHECK(wrong == 0);
  }

  TEST_CASE("scan points lie in their own hull") {
    const auto mesh = recon::car_proxy(64);
    const auto hull = hull_of(mesh, 64);
    const auto scan = scan_mesh(mesh, 18, 96);
    for (const auto& p : scan.points) {
      const Vec3 f = (p - hull.origin) / hull.spacing;
      const int i = int(std::lround(f.x)), j = int(std::lround(f.y)), k = int(std::lround(f.z));
      bool near = false;
      for (int dk = -1; dk <= 1 && !near; ++dk)
        for (int dj = -1; dj <= 1 && !near; ++dj)
          for (int di = -1; di <= 1 && !near; ++di) near = hull.at(i + di, j + dj, k + dk);
      CHECK(near);
    }
    views::SynthBlueprint blank = views::synth_blueprint(mesh, {32, 4, 0.05});
    for (auto& v : blank.views.views) v.mask->data.assign(v.mask->data.size(), 0.0f);
    CHECK_THROWS_AS(visual_hull(blank.views, 32), Error);
  }

  TEST_CASE("thickness matches the per-axis definition") {
    const auto fin = recon::fin_cube(0.02, 0.2);
    const auto small = subset(scan_mesh(geometry::normalize_mesh(fin.mesh).mesh, 18, 48), 7);
    REQUIRE(small.size() > 500);
    SamplerConfig cfg;
    const auto got = thickness_weights(small, cfg);
    const auto want = thickness_oracle(small, cfg);
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }

  TEST_CASE("thickness on spheres, plates and parallel sheets") {
    SamplerConfig cfg;
    const auto sphere = scan_mesh(recon::icosphere(0.5, 4), 18, 96);
    const auto ts = thickness_weights(sphere, cfg);
    const double m = mean(ts);
    for (double v : ts) CHECK(std::abs(v - m) <= 0.1 * m);

    const double t = 0.04;
    const auto plate = scan_mesh(recon::box_mesh({-0.5, -0.5, -t / 2}, {0.5, 0.5, t / 2}), 18, 128);
    const auto cube = scan_mesh(recon::box_mesh({-5 * t, -5 * t, -5 * t}, {5 * t, 5 * t, 5 * t}), 18, 128);
    CHECK(mean(thickness_weights(plate, cfg)) > 5 * mean(thickness_weights(cube, cfg)));

    SurfaceScan sheets;
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j)
        for (double z : {0.0, 0.1}) {
          sheets.points.push_back({i * 0.05, j * 0.05, z});
          sheets.normals.push_back({0, 0, 1});
        }
    for (double v : thickness_weights(sheets, cfg)) CHECK(v == 0.0);
  }

  TEST_CASE("weights against a scalar oracle") {
    const auto mesh = recon::box_mesh({-0.5, -0.3, -0.2}, {0.5, 0.3, 0.2});
    const auto scan = scan_mesh(mesh, 18, 64);
    const auto hull = hull_of(mesh, 64);
    SamplerConfig cfg;
    const auto w = compute_weights(scan, hull, cfg);
    CHECK(std::accumulate(w.weight.begin(), w.weight.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));

    const auto boundary = hull.boundary_points();
    Aabb hb;
    for (const auto& p : boundary) hb.extend(p);
    const double scale = cfg.hull_dist_scale * hb.diagonal();
    double raw_total = 0;
    for (std::size_t i = 0; i < scan.size(); ++i)
      raw_total += w.edge[i] * w.normal[i] + w.hull_dist[i] * w.hull_dist_normal[i] + w.thickness[i];

    Rng rng(8);
    int bottom = 0;
    for (int n = 0; n < 100; ++n) {
      const auto i = static_cast<std::size_t>(uniform01(rng) * scan.size());
      const double edge = std::clamp(double(scan.edge[i]), cfg.edge_floor, 1.0);
      const double h = scan.rel_height[i], down = scan.normals[i].z;
      const double wn = (h < 0.05 || h > 0.5 || down > -0.95) ? 1.0 : h;
      double d = 1e300;
      for (const auto& b : boundary) d = std::min(d, norm(b - scan.points[i]));
      const double hd = std::clamp(d / scale, 0.0, 1.0);
      const double hdn = cfg.hull_dist_normal_floor + (1 - cfg.hull_dist_normal_floor) * wn;
      CHECK(w.edge[i] == edge);
      CHECK(w.normal[i] == wn);
      CHECK(w.hull_dist[i] == doctest::Approx(hd).epsilon(1e-12));
      CHECK(w.hull_dist_normal[i] == doctest::Approx(hdn));
      const double raw = edge * wn + hd * hdn + w.thickness[i];
      CHECK(w.weight[i] == doctest::Approx(raw / raw_total).epsilon(1e-9));
      if (down < -0.99) {
        ++bottom;
        CHECK(h == doctest::Approx(0.0).epsilon(1e-6));
        CHECK(wn == 1.0);
      }
    }
    CHECK(bottom > 0);
  }

  TEST_CASE("constant factors give a uniform distribution") {
    const auto sphere = recon::icosphere(0.5, 3);
    const auto scan = scan_mesh(sphere, 18, 64);
    SamplerConfig cfg;
    cfg.edge_floor = 1.0;
    cfg.hull_dist_normal_floor = 1.0;
    cfg.use_thickness = false;
    cfg.use_hull_distance = false;
    const auto w = compute_weights(scan, hull_of(sphere, 32), cfg);
    for (double v : w.weight) CHECK(v == doctest::Approx(1.0 / scan.size()).epsilon(1e-12));
  }

  TEST_CASE("hidden pocket outweighs the outer shell on hull distance") {
    const auto mesh = recon::pocket_box(96);
    const auto scan = scan_mesh(mesh, 18, 128);
    const auto w = compute_weights(scan, hull_of(mesh, 96), SamplerConfig{});
    double floor_min = 1, outer_max = 0;
    int n_floor = 0, n_outer = 0;
    for (std::size_t i = 0; i < scan.size(); ++i) {
      const auto& p = scan.points[i];
      if (std::abs(p.z) < 0.01 && std::abs(p.x) < 0.2 && std::abs(p.y) < 0.08) {
        floor_min = std::min(floor_min, w.hull_dist[i]);
        ++n_floor;
      }
      if (std::abs(std::abs(p.y) - 0.25) < 0.005 || std::abs(p.z + 0.2) < 0.005) {
        outer_max = std::max(outer_max, w.hull_dist[i]);
        ++n_outer;
      }
    }
    REQUIRE(n_floor > 0);
    REQUIRE(n_outer > 0);
    CHECK(floor_min > outer_max);
  }

  TEST_CASE("draws follow the distribution") {
    std::vector<double> weight(10);
    for (int i = 0; i < 10; ++i) weight[i] = i + 1.0;
    const double total = 55.0;
    const std::size_t n = 20000;
    const auto idx = draw_indices(weight, n, 31);
    std::vector<int> hist(10, 0);
    for (auto i : idx) ++hist[i];
    double chi2 = 0;
    for (int i = 0; i < 10; ++i) {
      const double expected = n * weight[i] / total;
      chi2 += (hist[i] - expected) * (hist[i] - expected) / expected;
    }
    CHECK(chi2 < 21.666);  // 99% quantile, 9 degrees of freedom
    CHECK(draw_indices(weight, 50, 31) == std::vector<std::uint32_t>(idx.begin(), idx.begin() + 50));
    CHECK_THROWS_AS(draw_indices(std::vector<double>(4, 0.0), 3, 1), Error);
  }

  TEST_CASE("thin fins draw more than their area share") {
    const auto fin = recon::fin_cube(0.01, 0.2);
    const auto norm_mesh = geometry::normalize_mesh(fin.mesh);
    const auto scan = scan_mesh(norm_mesh.mesh, 18, 128);
    const auto w = compute_weights(scan, hull_of(norm_mesh.mesh, 128), SamplerConfig{});
    const auto idx = draw_indices(w.weight, 20000, 5);
    int on_fin = 0;
    for (auto i : idx) {
      const Vec3 p = norm_mesh.transform.invert(scan.points[i]);
      on_fin += p.z > fin.cube_top + 1e-3;
    }
    // all exposed fin area sits above the cube top
    CHECK(on_fin / 20000.0 > fin.fin_area / fin.total_area);
  }

  TEST_CASE("draw samples") {
    const auto mesh = recon::car_proxy(48);
    SamplerConfig cfg;
    cfg.seed = 17;
    const auto scan = scan_mesh(mesh, cfg.scan_cameras, 96);
    const auto w = compute_weights(scan, hull_of(mesh, 64), cfg);
    const auto a = draw_samples(mesh, scan, w, cfg);
    CHECK(a.records.size() == 22000);
    CHECK(write_samples(a) == write_samples(draw_samples(mesh, scan, w, cfg)));
    int surf = 0, close = 0;
    for (const auto& r : a.records) {
      CHECK(r.value == static_cast<float>(tsdf_map(r.sdf, cfg.truncation)));
      const double nn = std::sqrt(r.normal[0] * r.normal[0] + r.normal[1] * r.normal[1] + r.normal[2] * r.normal[2]);
      CHECK(nn == doctest::Approx(1.0).epsilon(1e-5));
      if (!r.surface) continue;
      ++surf;
      const Vec3 p{r.position[0], r.position[1], r.position[2]};
      close += scan.tree->nearest(p).distance <= 3 * cfg.surface_sigma;
    }
    CHECK(surf == 22000 - 2200);
    CHECK(close >= 0.99 * surf);
    cfg.seed = 18;
    CHECK(!(draw_samples(mesh, scan, w, cfg) == a));
  }

  TEST_CASE("sample files") {
    const auto fx = read_samples(read_file(std::string(VRECON_FIXTURES) + "/three.sdfs"));
    REQUIRE(fx.records.size() == 3);
    CHECK(fx.records[0] == SampleRecord{{0.1f, -0.2f, 0.3f}, -0.01f, {0, 0, 1}, 0.5f, 0.55f, true});
    CHECK(fx.records[1] == SampleRecord{{0, 0, 0}, 0.2f, {1, 0, 0}, 0.0f, 0.0f, false});
    CHECK(fx.records[2] == SampleRecord{{-0.5f, 0.25f, 0.125f}, 0.0f, {0, -1, 0}, 1.0f, 0.5f, true});

    const auto bytes = write_samples(fx);
    CHECK(read_samples(bytes) == fx);
    CHECK(bytes == read_file(std::string(VRECON_FIXTURES) + "/three.sdfs"));

    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(read_samples(bad), DecodeError);
    bad = bytes;
    bad[4] = 2;
    CHECK_THROWS_AS(read_samples(bad), DecodeError);
    bad = bytes;
    bad.pop_back();
    CHECK_THROWS_AS(read_samples(bad), DecodeError);
    bad = bytes;
    bad.push_back(0);
    CHECK_THROWS_AS(read_samples(bad), DecodeError);
    bad = bytes;
    bad[12 + 36] = 7;  // first surface flag
    CHECK_THROWS_AS(read_samples(bad), DecodeError);
    bad = bytes;
    bad[8] = 0xff;  // count far beyond the data
    CHECK_THROWS_AS(read_samples(bad), DecodeError);
  }

  TEST_CASE("weights ply") {
    const auto scan = scan_mesh(recon::cube_mesh(1.0, 2), 6, 16);
    std::vector<double> w(scan.size(), 1.0 / scan.size());
    const auto ply = weights_ply(scan, w);
    CHECK(ply.rfind("ply\n", 0) == 0);
    CHECK(ply.find("element vertex " + std::to_string(scan.size())) != std::string::npos);
    CHECK_THROWS_AS(weights_ply(scan, {}), Error);
  }

  TEST_CASE("config validation") {
    SamplerConfig c;
    CHECK_NOTHROW(c.validate());
    c.uniform_fraction = 1.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.surface_sigma = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.scan_cameras = 4;
    CHECK_THROWS_AS(c.validate(), Error);
  }
}
