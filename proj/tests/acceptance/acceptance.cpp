// Runs the thirteen acceptance checks and prints one PASS/FAIL line for each.
// Exit status is nonzero when any of them fails.
#include <CLI11.hpp>
#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include "vrecon/core/binary_io.hpp"
#include "vrecon/core/parallel.hpp"
#include "vrecon/core/random.hpp"
#include "vrecon/field/train.hpp"
#include "vrecon/geometry/kdtree.hpp"
#include "vrecon/geometry/mesh_io.hpp"
#include "vrecon/geometry/parity.hpp"
#include "vrecon/img/png_io.hpp"
#include "vrecon/pipeline/commands.hpp"
#include "vrecon/pipeline/config.hpp"
#include "vrecon/recon/grid.hpp"
#include "vrecon/recon/metrics.hpp"
#include "vrecon/recon/reconstruct.hpp"
#include "vrecon/recon/shapes.hpp"
#include "vrecon/sampling/hull.hpp"
#include "vrecon/sampling/samples.hpp"
#include "vrecon/sampling/scan.hpp"
#include "vrecon/sampling/weights.hpp"
#include "vrecon/service/server.hpp"
#include "vrecon/views/extract.hpp"
#include "vrecon/views/json.hpp"
#include "vrecon/views/synth.hpp"

using namespace vrecon;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path g_work;

std::string fmt(double v, int prec = 4) {
  std::ostringstream o;
  o.precision(prec);
  o << v;
  return o.str();
}

// ---- 1
Outcome normal_weight_grid() {
  int bad = 0;
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 200; ++j) {
      const double h = i / 100.0, n = -1.0 + j / 100.0;
      const bool down = n <= -0.95;
      const double want = (down && h >= 0.05 && h <= 0.5) ? h : 1.0;
      bad += sampling::w_normal(h, n) != want;
    }
  return {bad == 0, std::to_string(bad) + " deviations over 101x201"};
}

// ---- 2
// Thickness straight from the per-axis wording: for each axis, look among points
// whose normal component has the other sign and whose normal is far enough off.
double thickness_of(const sampling::SurfaceScan& s, std::size_t i, const sampling::SamplerConfig& cfg) {
  const double cos_t = std::cos(cfg.thickness_angle_threshold * std::numbers::pi / 180.0);
  const auto comp = [](const Vec3& v, int a) { return a == 0 ? v.x : a == 1 ? v.y : v.z; };
  double best = 0.0;
  for (int a = 0; a < 3; ++a) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < s.size(); ++j) {
      if ((comp(s.normals[i], a) >= 0) == (comp(s.normals[j], a) >= 0)) continue;
      if (dot(s.normals[i], s.normals[j]) >= cos_t) continue;
      d = std::min(d, norm(s.points[j] - s.points[i]));
    }
    if (std::isfinite(d)) best = std::max(best, 1.0 / std::max(d, cfg.dist_floor));
  }
  return std::min(best, cfg.thickness_clip) / cfg.thickness_clip;
}

Outcome weights_oracle() {
  const auto mesh = recon::box_mesh({-0.5, -0.3, -0.2}, {0.5, 0.3, 0.2});
  const auto scan = sampling::scan_mesh(mesh, 18, 32);
  const auto hull = sampling::visual_hull(views::synth_blueprint(mesh, {64, 4, 0.05}).views, 64);
  const sampling::SamplerConfig cfg;
  const auto w = sampling::compute_weights(scan, hull, cfg);

  const auto boundary = hull.boundary_points();
  Aabb hb;
  for (const auto& p : boundary) hb.extend(p);
  const double scale = cfg.hull_dist_scale * hb.diagonal();

  std::vector<double> raw(scan.size());
  parallel_for(scan.size(), [&](std::size_t i) {
    const double edge = std::clamp(double(scan.edge[i]), cfg.edge_floor, 1.0);
    const double h = scan.rel_height[i], nz = scan.normals[i].z;
    const double wn = (nz <= -0.95 && h >= 0.05 && h <= 0.5) ? h : 1.0;
    double d = std::numeric_limits<double>::infinity();
    for (const auto& b : boundary) d = std::min(d, norm(b - scan.points[i]));
    const double hd = std::clamp(d / scale, 0.0, 1.0);
    const double hdn = cfg.hull_dist_normal_floor + (1.0 - cfg.hull_dist_normal_floor) * wn;
    raw[i] = edge * wn + hd * hdn + thickness_of(scan, i, cfg);
  });
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);

  Rng rng(2024);
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    const auto i = static_cast<std::size_t>(uniform01(rng) * scan.size());
    const double want = raw[i] / total;
    worst = std::max(worst, std::abs(w.weight[i] - want) / want);
  }
  const double sum = std::accumulate(w.weight.begin(), w.weight.end(), 0.0);
  return {worst < 1e-6 && std::abs(sum - 1.0) <= 1e-6,
          "max rel err " + fmt(worst) + ", sum-1 " + fmt(sum - 1.0) + ", " + std::to_string(scan.size()) + " points"};
}

// ---- 3
Outcome fin_adaptivity() {
  const auto fin = recon::fin_cube(0.01, 0.2);
  const auto nm = geometry::normalize_mesh(fin.mesh);
  const auto scan = sampling::scan_mesh(nm.mesh, 18, 128);
  const auto hull = sampling::visual_hull(views::synth_blueprint(nm.mesh, {128, 4, 0.05}).views, 128);
  const auto w = sampling::compute_weights(scan, hull, sampling::SamplerConfig{});
  const std::size_t draws = 22000;
  const auto idx = sampling::draw_indices(w.weight, draws, 11);
  std::size_t on_fin = 0;
  for (auto i : idx) on_fin += nm.transform.invert(scan.points[i]).z > fin.cube_top + 1e-3;
  const double drawn = static_cast<double>(on_fin) / draws;
  const double area = fin.fin_area / fin.total_area;
  return {drawn >= 2.0 * area, "fin draws " + fmt(drawn) + " vs area " + fmt(area) + " (x" + fmt(drawn / area, 3) + ")"};
}

// ---- 4
Outcome sdf_sign() {
  const std::vector<std::pair<std::string, geometry::TriangleMesh>> shapes{
      {"sphere", recon::icosphere(0.5, 4)}, {"cube", recon::cube_mesh(1.0, 2)}, {"torus", recon::torus(0.3, 0.12, 48, 24)}};
  bool ok = true;
  std::string detail;
  for (const auto& [name, mesh] : shapes) {
    const auto scan = sampling::scan_mesh(mesh, 18, 128);
    const geometry::ParityScanner parity(mesh);
    const auto box = mesh.bounds().inflated(0.05);
    const int n = 10000;
    std::vector<Vec3> pts(n);
    Rng rng(77);
    for (auto& p : pts) {
      const Vec3 e = box.extent();
      p = box.lo + Vec3{uniform01(rng) * e.x, uniform01(rng) * e.y, uniform01(rng) * e.z};
    }
    std::vector<std::uint8_t> agree(n);
    parallel_for(pts.size(), [&](std::size_t i) {
      agree[i] = (sampling::signed_distance(scan, pts[i]) < 0) == parity.inside(pts[i]);
    });
    const double frac = std::accumulate(agree.begin(), agree.end(), 0.0) / n;
    ok = ok && frac >= 0.99;
    detail += name + " " + fmt(frac) + " ";
  }
  return {ok, detail};
}

// ---- 5
Outcome hull_box() {
  const Vec3 lo{-0.5, -0.2, -0.15}, hi{0.5, 0.2, 0.15};
  const auto mesh = recon::box_mesh(lo, hi);
  const auto hull = sampling::visual_hull(views::synth_blueprint(mesh, {64, 4, 0.05}).views, 64);
  const auto b = hull.occupied_bounds();
  const double err = std::max({std::abs(b.lo.x - lo.x), std::abs(b.lo.y - lo.y), std::abs(b.lo.z - lo.z),
                               std::abs(b.hi.x - hi.x), std::abs(b.hi.y - hi.y), std::abs(b.hi.z - hi.z)});
  return {err <= hull.spacing, "worst face offset " + fmt(err / hull.spacing, 3) + " voxels"};
}

// ---- 6
Outcome kdtree_exact() {
  Rng rng(6);
  const auto rnd = [&] { return Vec3{uniform01(rng), uniform01(rng), uniform01(rng)}; };
  std::vector<Vec3> pts(1000);
  for (auto& p : pts) p = rnd();
  const geometry::KdTree tree(pts);
  int bad = 0;
  for (int q = 0; q < 1000; ++q) {
    const Vec3 x = rnd();
    std::uint32_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::uint32_t i = 0; i < pts.size(); ++i)
      if (const double d = norm(pts[i] - x); d < bd) bd = d, best = i;
    const auto n = tree.nearest(x);
    bad += n.index != best || n.distance != bd;
  }
  return {bad == 0, std::to_string(bad) + " mismatches"};
}

// ---- 7
Outcome gradient_check() {
  field::FieldConfig c;
  c.encoder.stacks = 1;
  c.encoder.initial_downsample_steps = 1;
  c.encoder.internal_downsample_steps = 1;
  c.encoder.feature_depth = 2;
  c.encoder.max_input_dim = 16;
  c.mlp.hidden = {5};
  c.init_seed = 3;
  const auto params = field::init_params(c);
  views::SynthConfig sc;
  sc.resolution = 16;
  const auto inputs = field::prepare_inputs(views::synth_blueprint(recon::cube_mesh(1.0, 2), sc).views, c.encoder);
  Rng rng(9);
  std::vector<sampling::SampleRecord> batch;
  for (int i = 0; i < 6; ++i) {
    sampling::SampleRecord r;
    for (auto& x : r.position) x = static_cast<float>(uniform01(rng) - 0.5);
    const Vec3 n = normalized(Vec3{standard_normal(rng), standard_normal(rng), standard_normal(rng)});
    r.normal = {float(n.x), float(n.y), float(n.z)};
    r.value = static_cast<float>(uniform01(rng));
    r.edge = static_cast<float>(uniform01(rng));
    r.surface = i % 2 == 0;
    batch.push_back(r);
  }
  const auto mlp = field::grad_check(params, inputs, batch, {}, 1e-5, true);
  const auto all = field::grad_check(params, inputs, batch, {}, 1e-5, false);
  return {mlp.max_relative_error < 1e-4 && all.max_relative_error < 1e-3 && all.checked > mlp.checked,
          "mlp " + fmt(mlp.max_relative_error) + " (" + std::to_string(mlp.checked) + "), full " +
              fmt(all.max_relative_error) + " (" + std::to_string(all.checked) + ")"};
}

// ---- 8
pipeline::ProjectConfig overfit_config() {
  auto cfg = pipeline::load_config(std::string(VRECON_SOURCE_DIR) + "/configs/toy.yaml");
  cfg.paths.blueprints = (g_work / "overfit" / "blueprints").string();
  cfg.paths.samples = (g_work / "overfit" / "samples").string();
  cfg.paths.checkpoints = (g_work / "overfit" / "checkpoints").string();
  cfg.sampler.n_samples = 22000;
  return cfg;
}

Outcome overfit() {
  const auto cfg = overfit_config();
  const auto mesh_path = (g_work / "overfit" / "car.obj").string();
  const auto truth = geometry::normalize_mesh(recon::car_proxy(160)).mesh;
  geometry::save_mesh_file(truth, mesh_path);
  std::ostringstream log;
  if (pipeline::cmd_synth({mesh_path}, cfg, log) != 0 || pipeline::cmd_prep({mesh_path}, cfg, log) != 0 ||
      pipeline::cmd_train(cfg, false, log) != 0)
    return {false, "pipeline failed: " + log.str()};

  const auto set = pipeline::load_blueprint(cfg.paths.blueprints + "/car.json");
  const auto params =
      field::load_weights(read_file(cfg.paths.checkpoints + "/" + cfg.checkpoint_name + ".pafw"), cfg.field);
  recon::ScalarGrid grid;
  const auto mesh = recon::reconstruct(set, params, cfg.reconstruct, &grid);
  if (mesh.triangles.empty()) return {false, "empty reconstruction"};
  const auto m = recon::eval_metrics(mesh, truth);
  const double limit = 2.0 * grid.spacing;
  return {m.iou >= 0.85 && m.chamfer <= limit, "IoU " + fmt(m.iou, 3) + ", Chamfer " + fmt(m.chamfer, 3) + " (limit " +
                                                   fmt(limit, 3) + ") after " +
                                                   std::to_string(cfg.train.iterations) + " steps"};
}

// ---- 9
long euler_characteristic(const geometry::TriangleMesh& m) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) ++edges[{std::min(t[k], t[(k + 1) % 3]), std::max(t[k], t[(k + 1) % 3])}];
  return static_cast<long>(m.vertices.size()) - static_cast<long>(edges.size()) + static_cast<long>(m.triangles.size());
}

bool watertight(const geometry::TriangleMesh& m) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) ++edges[{std::min(t[k], t[(k + 1) % 3]), std::max(t[k], t[(k + 1) % 3])}];
  return !m.triangles.empty() && std::all_of(edges.begin(), edges.end(), [](const auto& e) { return e.second == 2; });
}

Outcome marching_sphere() {
  const double r = 0.35;
  auto g = recon::make_grid({{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}}, 64);
  recon::fill_grid(g, [&](const Vec3& p) { return sampling::tsdf_map(norm(p) - r, 0.1); });
  const auto m50 = recon::marching_cubes(g, 0.5);
  const auto m45 = recon::marching_cubes(g, 0.45);
  double worst = 0.0;
  for (const auto& v : m50.vertices) worst = std::max(worst, std::abs(norm(v) - r));
  const bool closed = watertight(m50);
  const long chi = euler_characteristic(m50);
  const double v50 = geometry::signed_volume(m50), v45 = geometry::signed_volume(m45);
  return {closed && chi == 2 && worst < 1.5 * g.spacing && v45 >= v50,
          std::string(closed ? "watertight" : "open") + ", chi " + std::to_string(chi) + ", radial err " +
              fmt(worst / g.spacing, 3) + " spacings, volume " + fmt(v50) + " -> " + fmt(v45)};
}

// ---- 10
Outcome floating_wing() {
  const auto g = recon::detached_wing_grid(64);
  const auto at50 = recon::marching_cubes(g, 0.5);
  const auto at45 = recon::marching_cubes(g, 0.45);
  const int c50 = recon::component_count(at50), c45 = recon::component_count(at45);
  double top = -1e9;
  for (const auto& v : recon::largest_component(at50).vertices) top = std::max(top, v.z);
  const bool wing_gone = top < 0.1;
  return {c50 == 2 && wing_gone && c45 == 1,
          "components " + std::to_string(c50) + " at 0.5 (kept top z " + fmt(top, 3) + "), " + std::to_string(c45) +
              " at 0.45"};
}

// ---- 11
// Random car-like composites: a body box with a cabin box on top, varied in
// width, height, sheet resolution and gap.
geometry::TriangleMesh random_vehicle(Rng& rng) {
  const auto u = [&](double a, double b) { return a + (b - a) * uniform01(rng); };
  const double w = u(0.25, 0.6), h = u(0.12, 0.35);
  auto m = recon::box_mesh({-0.5, -w / 2, 0.0}, {0.5, w / 2, h});
  const double cx = u(-0.2, 0.1), cl = u(0.2, 0.45), cw = w * u(0.6, 0.9), ch = u(0.05, 0.2);
  geometry::append(m, recon::box_mesh({cx - cl / 2, -cw / 2, h - 0.01}, {cx + cl / 2, cw / 2, h + ch}));
  return m;
}

bool near(const views::BoundingBox& a, const views::BoundingBox& b) {
  return std::abs(a.x - b.x) <= 1 && std::abs(a.y - b.y) <= 1 && std::abs(a.x + a.w - b.x - b.w) <= 1 &&
         std::abs(a.y + a.h - b.y - b.h) <= 1;
}

Outcome extraction_round_trip() {
  Rng rng(1111);
  int boxes_ok = 0, id_checked = 0, id_ok = 0;
  std::string first_failure;
  for (int n = 0; n < 20; ++n) {
    const auto mesh = random_vehicle(rng);
    views::SynthConfig sc;
    sc.resolution = 64 + static_cast<int>(uniform01(rng) * 128);
    sc.gap = 4 + static_cast<int>(uniform01(rng) * 12);
    const auto bp = views::synth_blueprint(mesh, sc);
    const auto res = views::extract_views(bp.sheet);

    std::vector<views::BoundingBox> found;
    if (res.status == views::ExtractStatus::Ok)
      for (const auto& v : res.views.views) found.push_back(v.box);
    else
      found = res.candidates;
    bool all = found.size() == 4;
    for (const auto& t : bp.views.views)
      all = all && std::any_of(found.begin(), found.end(), [&](const auto& f) { return near(f, t.box); });
    boxes_ok += all;
    if (!all && first_failure.empty()) first_failure = " first failure #" + std::to_string(n);

    const auto& top = bp.views.get(views::Kind::Top).box;
    const auto& side = bp.views.get(views::Kind::Side).box;
    if (top.h >= 1.05 * side.h) {
      ++id_checked;
      bool ok = res.status == views::ExtractStatus::Ok;
      if (ok) {
        for (const auto& v : res.views.views) {
          if (v.label.kind == views::Kind::Top) ok = ok && near(v.box, top);
          if (v.label.kind == views::Kind::Side) ok = ok && near(v.box, side);
        }
      }
      id_ok += ok;
    }
  }
  return {boxes_ok == 20 && id_ok == id_checked,
          "boxes " + std::to_string(boxes_ok) + "/20, top/side " + std::to_string(id_ok) + "/" +
              std::to_string(id_checked) + first_failure};
}

// ---- 12
Outcome dynamic_sizes() {
  const field::EncoderConfig enc;
  const auto dyn = field::feature_elements(enc, {{512, 200}, {512, 180}, {150, 200}, {150, 200}});
  const auto pad = field::feature_elements(enc, {{512, 512}, {512, 512}, {512, 512}, {512, 512}});
  const double ratio = static_cast<double>(dyn) / static_cast<double>(pad);
  return {ratio < 0.45, "ratio " + fmt(ratio, 3)};
}

// ---- 13
Outcome http_end_to_end() {
  const auto cfg = overfit_config();
  const auto ckpt = fs::path(cfg.paths.checkpoints) / (cfg.checkpoint_name + ".pafw");
  if (!fs::exists(ckpt)) return {false, "no overfit checkpoint at " + ckpt.string()};
  pipeline::ServiceConfig sc;
  sc.port = 0;
  sc.store = (g_work / "service").string();
  service::Server server(sc, cfg.paths.checkpoints);
  httplib::Client cli("127.0.0.1", server.start());
  cli.set_read_timeout(60);

  const auto png = read_file(cfg.paths.blueprints + "/car.png");
  const auto desc = read_file(cfg.paths.blueprints + "/car.json");
  auto up = cli.Post("/blueprints", std::string(png.begin(), png.end()), "image/png");
  if (!up || up->status != 201) return {false, "upload failed"};
  const std::string id = json::parse(up->body)["id"];
  auto put = cli.Put("/blueprints/" + id + "/views", std::string(desc.begin(), desc.end()), "application/json");
  if (!put || put->status != 200) return {false, "finalize failed: " + (put ? put->body : std::string("no reply"))};
  json req{{"checkpoint", cfg.checkpoint_name}, {"iso", 0.5}, {"resolution", 96}, {"keep_largest", true}};
  auto job = cli.Post("/blueprints/" + id + "/reconstruct", req.dump(), "application/json");
  if (!job || job->status != 202) return {false, "job not accepted: " + (job ? job->body : std::string("no reply"))};
  const std::string jid = json::parse(job->body)["id"];
  std::string state;
  for (int i = 0; i < 1200 && state != "done" && state != "failed"; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    auto r = cli.Get("/jobs/" + jid);
    if (r && r->status == 200) state = json::parse(r->body)["state"];
  }
  if (state != "done") return {false, "job ended as '" + state + "'"};
  auto obj = cli.Get("/jobs/" + jid + "/mesh.obj");
  if (!obj || obj->status != 200) return {false, "download failed"};
  try {
    const auto mesh = geometry::load_mesh({reinterpret_cast<const std::uint8_t*>(obj->body.data()), obj->body.size()},
                                          geometry::MeshFormat::Obj);
    return {!mesh.triangles.empty(), "downloaded " + std::to_string(mesh.triangles.size()) + " triangles"};
  } catch (const std::exception& e) {
    return {false, std::string("OBJ did not parse: ") + e.what()};
  }
}

struct Criterion {
  int number;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string workdir = (fs::temp_directory_path() / "vrecon-acceptance").string();
  std::vector<int> only;
  app.add_option("--workdir", workdir, "scratch directory (wiped first)");
  app.add_option("--only", only, "run just these criteria");
  CLI11_PARSE(app, argc, argv);
  g_work = workdir;
  fs::remove_all(g_work);
  fs::create_directories(g_work / "overfit");

  const std::vector<Criterion> all{
      {1, "normal weight piecewise rule", 1, normal_weight_grid},
      {2, "sample weights vs oracle", 10, weights_oracle},
      {3, "thin fin sampling", 30, fin_adaptivity},
      {4, "sdf sign vs ray parity", 60, sdf_sign},
      {5, "visual hull of a box", 10, hull_box},
      {6, "k-d tree exactness", 5, kdtree_exact},
      {7, "gradient check", 60, gradient_check},
      {8, "overfit reconstruction", 600, overfit},
      {9, "marching cubes sphere", 10, marching_sphere},
      {10, "floating wing removal", 10, floating_wing},
      {11, "view extraction round trip", 30, extraction_round_trip},
      {12, "dynamic size economy", 1, dynamic_sizes},
      {13, "HTTP end to end", 120, http_end_to_end},
  };

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.number) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << " " << c.number << " " << c.name << ": " << o.detail << " [" << fmt(secs, 3)
              << "s" << (in_time ? "" : ", over " + fmt(c.budget_s, 3) + "s budget") << "]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
