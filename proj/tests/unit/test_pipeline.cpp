#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "vrecon/core/binary_io.hpp"
#include "vrecon/field/params.hpp"
#include "vrecon/geometry/mesh_io.hpp"
#include "vrecon/img/png_io.hpp"
#include "vrecon/pipeline/commands.hpp"
#include "vrecon/pipeline/config.hpp"
#include "vrecon/recon/shapes.hpp"
#include "vrecon/sampling/samples.hpp"
#include "vrecon/views/extract.hpp"
#include "vrecon/views/json.hpp"

using namespace vrecon;
using namespace vrecon::pipeline;
namespace fs = std::filesystem;

namespace {

// Fresh directory per use, removed on scope exit.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("vrecon-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

ProjectConfig toy_project(const TempDir& dir) {
  auto cfg = load_config(std::string(VRECON_SOURCE_DIR) + "/configs/toy.yaml");
  cfg.paths.blueprints = dir / "bp";
  cfg.paths.samples = dir / "samples";
  cfg.paths.checkpoints = dir / "ckpt";
  cfg.train.iterations = 2;
  cfg.train.samples_per_step = 64;
  cfg.reconstruct.resolution = 24;
  return cfg;
}

std::string write_mesh(const TempDir& dir, const std::string& name, const geometry::TriangleMesh& m) {
  const auto path = dir / name;
  geometry::save_mesh_file(m, path);
  return path;
}

std::string read_file_text(const std::string& path) {
  const auto b = read_file(path);
  return {b.begin(), b.end()};
}

int count_lines(const std::string& path) {
  std::ifstream in(path);
  int n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("config defaults, files and overrides") {
    const ProjectConfig defaults;
    CHECK(to_yaml(parse_config("")) == to_yaml(defaults));
    CHECK(to_yaml(parse_config(to_yaml(defaults))) == to_yaml(defaults));
    CHECK(to_yaml(load_config(std::string(VRECON_SOURCE_DIR) + "/configs/default.yaml")) == to_yaml(defaults));

    const auto toy = load_config(std::string(VRECON_SOURCE_DIR) + "/configs/toy.yaml");
    CHECK(toy.field == field::toy_field_config());
    CHECK(toy.train.optimizer == field::Optimizer::Adam);
    CHECK(toy.synth.resolution == toy.field.encoder.max_input_dim);

    const auto o = parse_config("train:\n  learning_rate: 0.5\n",
                                {"field.hidden=[4, 4]", "train.optimizer=adam", "reconstruct.iso=0.45"});
    CHECK(o.train.learning_rate == 0.5);
    CHECK(o.field.mlp.hidden == std::vector<int>{4, 4});
    CHECK(o.train.optimizer == field::Optimizer::Adam);
    CHECK(o.reconstruct.iso == 0.45);

    auto message_of = [](auto fn) -> std::string {
      try {
        fn();
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Invalid);
        return e.what();
      }
      return "";
    };
    CHECK(message_of([] { parse_config("train:\n  learning_rat: 1\n"); }).find("train.learning_rat") != std::string::npos);
    CHECK(message_of([] { parse_config("bogus: 1\n"); }).find("bogus") != std::string::npos);
    CHECK(message_of([] { parse_config("train:\n  iterations: many\n"); }).find("train.iterations") != std::string::npos);
    CHECK(message_of([] { parse_config("reconstruct:\n  iso: 1.5\n"); }) != "");
    CHECK(message_of([] { parse_config("", {"train.iterations"}); }) != "");
    CHECK(message_of([] { parse_config("", {"nope.key=1"}); }).find("nope.key") != std::string::npos);
    CHECK(message_of([] { parse_config("[1, 2]"); }) != "");
  }

  TEST_CASE("exit codes and ids") {
    CHECK(exit_code_for(ErrorCode::ManualRequired) == 3);
    CHECK(exit_code_for(ErrorCode::UnresolvedViews) == 3);
    CHECK(exit_code_for(ErrorCode::TieUnresolved) == 3);
    CHECK(exit_code_for(ErrorCode::SizeMismatch) == 2);
    CHECK(exit_code_for(ErrorCode::Io) == 2);
    CHECK(mesh_id("a/b/car_01.obj") == "car_01");
  }

  TEST_CASE("synth writes a blueprint that cuts back to its boxes") {
    TempDir dir("synth");
    auto cfg = toy_project(dir);
    const auto cube = write_mesh(dir, "cube.obj", recon::cube_mesh(2.0, 2));
    std::ostringstream log;
    CHECK(cmd_synth({cube}, cfg, log) == 0);
    for (const char* f : {"cube.png", "cube.json", "cube.front.png", "cube.back.png", "cube.side.png", "cube.top.png"})
      CHECK(fs::exists(fs::path(cfg.paths.blueprints) / f));
    CHECK(!fs::exists(fs::path(cfg.paths.blueprints) / "cube.interior.png"));

    const auto sheet = img::read_png_gray(read_file(cfg.paths.blueprints + "/cube.png"));
    const auto set = load_blueprint(cfg.paths.blueprints + "/cube.json");
    CHECK(set.finalized());
    const auto ex = views::extract_views(sheet);
    // four identical squares: the boxes are found, the labels are a tie for the user
    CHECK(ex.status == views::ExtractStatus::TieUnresolved);
    REQUIRE(ex.candidates.size() == 4);
    for (const auto& v : set.views) {
      bool found = false;
      for (const auto& c : ex.candidates)
        found = found || (std::abs(c.x - v.box.x) <= 1 && std::abs(c.y - v.box.y) <= 1 &&
                          std::abs(c.x + c.w - v.box.x - v.box.w) <= 1 && std::abs(c.y + c.h - v.box.y - v.box.h) <= 1);
      CHECK(found);
    }

    const auto first = read_file(cfg.paths.blueprints + "/cube.png");
    CHECK(cmd_synth({cube}, cfg, log) == 0);
    CHECK(read_file(cfg.paths.blueprints + "/cube.png") == first);

    std::ostringstream missing;
    CHECK(cmd_synth({dir / "absent.obj"}, cfg, missing) == 2);
    CHECK(missing.str().find("absent") != std::string::npos);
    CHECK(cmd_synth({}, cfg, missing) == 2);
  }

  TEST_CASE("prep, train, reconstruct and eval in one directory") {
    TempDir dir("flow");
    auto cfg = toy_project(dir);
    const auto car = write_mesh(dir, "car.obj", recon::car_proxy(48));
    std::ostringstream log;
    REQUIRE(cmd_synth({car}, cfg, log) == 0);
    REQUIRE(cmd_prep({car}, cfg, log) == 0);

    const auto sdfs = read_file(cfg.paths.samples + "/car.sdfs");
    const auto set = sampling::read_samples(sdfs);
    CHECK(set.records.size() >= 20000);
    CHECK(set.records.size() <= 25000);
    CHECK(fs::exists(cfg.paths.samples + "/car.weights.ply"));
    REQUIRE(cmd_prep({car}, cfg, log) == 0);
    CHECK(read_file(cfg.paths.samples + "/car.sdfs") == sdfs);
    CHECK(cmd_prep({}, cfg, log) == 2);
    std::ostringstream bad_log;
    CHECK(cmd_prep({car, dir / "nothing.stl"}, cfg, bad_log) == 2);
    CHECK(bad_log.str().find("nothing") != std::string::npos);

    REQUIRE(cmd_train(cfg, false, log) == 0);
    const auto ckpt = cfg.paths.checkpoints + "/model.pafw";
    CHECK(fs::exists(ckpt));
    CHECK(count_lines(cfg.paths.checkpoints + "/model.loss.csv") == 1 + 2);
    REQUIRE(cmd_train(cfg, true, log) == 0);
    CHECK(count_lines(cfg.paths.checkpoints + "/model.loss.csv") == 1 + 4);
    {
      std::ifstream in(cfg.paths.checkpoints + "/model.loss.csv");
      std::string line;
      int expect = 0;  // steps continue across the resume
      std::getline(in, line);
      while (std::getline(in, line)) CHECK(std::stoi(line.substr(0, line.find(','))) == expect++);
    }
    auto other = cfg;
    other.field.mlp.hidden = {8};
    CHECK_THROWS_AS(cmd_train(other, true, log), Error);

    const auto json = cfg.paths.blueprints + "/car.json";
    const auto out50 = dir / "car50.obj", out45 = dir / "car45.obj";
    CHECK(cmd_reconstruct(json, ckpt, out50, cfg, log) == 0);
    auto thick = cfg;
    thick.reconstruct.iso = 0.45;
    CHECK(cmd_reconstruct(json, ckpt, out45, thick, log) == 0);
    REQUIRE(fs::exists(out50));
    const auto m50 = geometry::load_mesh_file(out50), m45 = geometry::load_mesh_file(out45);
    CHECK(geometry::signed_volume(m45) >= geometry::signed_volume(m50) - 1e-12);

    // the bare sheet: front and back cannot be told apart without a person
    std::ostringstream human;
    CHECK(cmd_reconstruct(cfg.paths.blueprints + "/car.png", ckpt, dir / "x.obj", cfg, human) == 3);
    CHECK(human.str().find("serve") != std::string::npos);
    auto doc = nlohmann::json::parse(read_file_text(json));
    doc["views"][0]["kind"] = "unresolved";
    write_text_file(dir / "half.json", doc.dump());
    CHECK(cmd_reconstruct(dir / "half.json", ckpt, dir / "y.obj", cfg, log, cfg.paths.blueprints + "/car.png") == 3);

    // a checkpoint trained for other input sizes
    auto wide = cfg;
    wide.field.encoder.max_input_dim = 256;
    const auto wrong = field::init_params(wide.field);
    write_file(dir / "wrong.pafw", field::save_weights(wrong));
    std::ostringstream size_log;
    try {
      cmd_reconstruct(json, dir / "wrong.pafw", dir / "z.obj", cfg, size_log);
      FAIL("expected SizeMismatch");
    } catch (const Error& e) {
      CHECK(exit_code_for(e.code()) == 2);
      CHECK(size_log.str().find("Rescale") != std::string::npos);
    }

    fs::remove(cfg.paths.samples + "/car.sdfs");
    try {
      load_dataset(cfg);
      FAIL("expected a missing-sample error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("'car'") != std::string::npos);
    }
  }

  TEST_CASE("eval") {
    TempDir dir("eval");
    const auto a = write_mesh(dir, "a.obj", recon::box_mesh({-1, -1, -1}, {1, 1, 1}));
    const auto b = write_mesh(dir, "b.obj", recon::box_mesh({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}));
    std::ostringstream same, half, normalized;
    CHECK(cmd_eval(b, b, same, 4000, 48) == 0);
    CHECK(nlohmann::json::parse(same.str())["iou"].get<double>() == doctest::Approx(1.0));
    std::ostringstream raw_same;
    CHECK(cmd_eval(a, a, raw_same, 4000, 48, true) == 0);
    CHECK(nlohmann::json::parse(raw_same.str())["iou"].get<double>() == doctest::Approx(1.0));
    CHECK(cmd_eval(b, a, half, 4000, 48, true) == 0);
    CHECK(nlohmann::json::parse(half.str())["iou"].get<double>() == doctest::Approx(0.125).epsilon(0.03));
    // by default the truth is brought to normalized units first, and b is exactly that
    CHECK(cmd_eval(b, a, normalized, 4000, 48) == 0);
    CHECK(nlohmann::json::parse(normalized.str())["iou"].get<double>() == doctest::Approx(1.0));
  }

  TEST_CASE("reference checkpoint") {
    const auto p = field::load_weights(read_file(std::string(VRECON_FIXTURES) + "/tiny.pafw"));
    CHECK(p.count() == 778);
    CHECK(p.config.encoder.stacks == 1);
    CHECK(p.config.mlp.hidden == std::vector<int>{5});
    CHECK(p.config.init_seed == 3);
    std::size_t i = 0;
    for (const auto& t : p.tensors)
      for (float v : t) CHECK(v == static_cast<float>(i++ * 0.001));
  }
}
