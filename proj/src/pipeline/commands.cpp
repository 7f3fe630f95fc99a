#include "vrecon/pipeline/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "vrecon/core/binary_io.hpp"
#include "vrecon/geometry/mesh_io.hpp"
#include "vrecon/img/png_io.hpp"
#include "vrecon/recon/metrics.hpp"
#include "vrecon/recon/reconstruct.hpp"
#include "vrecon/sampling/hull.hpp"
#include "vrecon/sampling/samples.hpp"
#include "vrecon/sampling/scan.hpp"
#include "vrecon/sampling/weights.hpp"
#include "vrecon/views/extract.hpp"
#include "vrecon/views/json.hpp"
#include "vrecon/views/synth.hpp"

namespace fs = std::filesystem;

namespace vrecon::pipeline {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ManualRequired:
    case ErrorCode::UnresolvedViews:
    case ErrorCode::TieUnresolved:
    case ErrorCode::CutFailed:
    case ErrorCode::IdentificationFailed:
      return kNeedsHuman;
    case ErrorCode::Dimension:
    case ErrorCode::Range:
    case ErrorCode::Decode:
    case ErrorCode::Parse:
    case ErrorCode::DegenerateMesh:
    case ErrorCode::EmptyInput:
    case ErrorCode::EmptyHull:
    case ErrorCode::ZeroWeights:
    case ErrorCode::SizeMismatch:
    case ErrorCode::ConfigMismatch:
    case ErrorCode::Format:
    case ErrorCode::Io:
    case ErrorCode::Invalid:
      return kInvalidInput;
  }
  return kInternal;
}

std::string mesh_id(const std::string& path) { return fs::path(path).stem().string(); }

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create directory '" + dir + "'");
}

void require_dir(const std::string& dir, const char* what) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, std::string(what) + " directory '" + dir + "' does not exist");
}

std::string in_dir(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

geometry::TriangleMesh load_normalized(const std::string& path) {
  return geometry::normalize_mesh(geometry::load_mesh_file(path)).mesh;
}

// runs `fn` per mesh, logging failures instead of stopping
template <class Fn>
int for_each_mesh(const std::vector<std::string>& meshes, std::ostream& log, Fn fn) {
  if (meshes.empty()) {
    log << "error: no mesh files given\n";
    return kInvalidInput;
  }
  int failed = 0;
  for (const auto& m : meshes) {
    const std::string id = mesh_id(m);
    try {
      fn(m, id);
    } catch (const Error& e) {
      log << "[" << id << "] failed (" << to_string(e.code()) << "): " << e.what() << "\n";
      ++failed;
    } catch (const std::exception& e) {
      log << "[" << id << "] failed: " << e.what() << "\n";
      ++failed;
    }
  }
  return failed ? kInvalidInput : kOk;
}

std::string kind_file(views::Kind k) {
  std::string s = views::to_string(k);
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

int cmd_prep(const std::vector<std::string>& meshes, const ProjectConfig& cfg, std::ostream& log) {
  ensure_dir(cfg.paths.samples);
  return for_each_mesh(meshes, log, [&](const std::string& path, const std::string& id) {
    const auto mesh = load_normalized(path);
    // the hull is carved from the same views training will see
    const auto bp = views::synth_blueprint(mesh, cfg.synth);
    const auto scan = sampling::scan_mesh(mesh, cfg.sampler.scan_cameras, cfg.sampler.scan_resolution);
    const auto hull = sampling::visual_hull(bp.views, cfg.sampler.hull_resolution);
    const auto w = sampling::compute_weights(scan, hull, cfg.sampler);
    const auto samples = sampling::draw_samples(mesh, scan, w, cfg.sampler);
    write_file(in_dir(cfg.paths.samples, id + ".sdfs"), sampling::write_samples(samples));
    write_text_file(in_dir(cfg.paths.samples, id + ".weights.ply"), sampling::weights_ply(scan, w.weight));
    log << "[" << id << "] " << samples.records.size() << " samples from " << scan.points.size() << " scan points\n";
  });
}

int cmd_synth(const std::vector<std::string>& meshes, const ProjectConfig& cfg, std::ostream& log) {
  ensure_dir(cfg.paths.blueprints);
  return for_each_mesh(meshes, log, [&](const std::string& path, const std::string& id) {
    const auto bp = views::synth_blueprint(load_normalized(path), cfg.synth);
    const auto& dir = cfg.paths.blueprints;
    write_file(in_dir(dir, id + ".png"), img::write_png(bp.sheet));
    write_text_file(in_dir(dir, id + ".json"), views::to_json(bp.views).dump(2) + "\n");
    for (const auto& v : bp.views.views)
      write_file(in_dir(dir, id + "." + kind_file(v.label.kind) + ".png"), img::write_png(v.image));
    if (bp.interior_sheet) write_file(in_dir(dir, id + ".interior.png"), img::write_png(*bp.interior_sheet));
    log << "[" << id << "] blueprint " << bp.sheet.width << "x" << bp.sheet.height << (bp.interior_sheet ? " with interior" : "")
        << "\n";
  });
}

views::ViewSet load_blueprint(const std::string& json_path, const std::optional<std::string>& image) {
  const auto text = read_file(json_path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Invalid, "'" + json_path + "' is not JSON: " + e.what());
  }
  auto set = views::viewset_from_json(doc);
  fs::path sheet_path = image ? fs::path(*image) : fs::path(json_path).replace_extension(".png");
  const auto sheet = img::read_png_gray(read_file(sheet_path.string()));
  if (sheet.width != set.source_width || sheet.height != set.source_height)
    throw Error(ErrorCode::Invalid, "sheet '" + sheet_path.string() + "' does not match the descriptor's source_size");
  views::attach_images(set, sheet);
  auto interior_path = fs::path(json_path).replace_extension(".interior.png");
  if (!image && fs::exists(interior_path)) {
    auto copy = set;
    views::attach_images(copy, img::read_png_gray(read_file(interior_path.string())));
    for (std::size_t i = 0; i < set.views.size(); ++i) set.views[i].interior = std::move(copy.views[i].image);
  }
  return set;
}

std::vector<field::TrainExample> load_dataset(const ProjectConfig& cfg) {
  require_dir(cfg.paths.blueprints, "blueprints");
  require_dir(cfg.paths.samples, "samples");
  std::vector<fs::path> descriptors;
  for (const auto& e : fs::directory_iterator(cfg.paths.blueprints))
    if (e.path().extension() == ".json") descriptors.push_back(e.path());
  std::sort(descriptors.begin(), descriptors.end());
  if (descriptors.empty()) throw Error(ErrorCode::EmptyInput, "no blueprint descriptors in '" + cfg.paths.blueprints + "'");
  std::vector<field::TrainExample> out;
  for (const auto& d : descriptors) {
    const std::string id = d.stem().string();
    const auto sample_path = in_dir(cfg.paths.samples, id + ".sdfs");
    if (!fs::exists(sample_path)) throw Error(ErrorCode::Io, "no sample file for mesh '" + id + "' (expected " + sample_path + ")");
    auto set = load_blueprint(d.string());
    if (!set.finalized()) throw Error(ErrorCode::UnresolvedViews, "blueprint '" + id + "' is not finalized");
    out.push_back({std::move(set), sampling::read_samples(read_file(sample_path))});
  }
  return out;
}

int cmd_train(const ProjectConfig& cfg, bool resume, std::ostream& log) {
  const auto data = load_dataset(cfg);
  ensure_dir(cfg.paths.checkpoints);
  const std::string base = in_dir(cfg.paths.checkpoints, cfg.checkpoint_name);
  field::TrainState state;
  if (resume) {
    state = field::load_state(read_file(base + ".state"));
    if (!(state.params.config == cfg.field))
      throw Error(ErrorCode::ConfigMismatch, "saved state was trained with a different field configuration");
    log << "resuming at step " << state.step << "\n";
  } else {
    state.params = field::init_params(cfg.field);
  }
  log << data.size() << " blueprint(s), " << state.params.count() << " parameters\n";
  std::ofstream csv(base + ".loss.csv", resume ? std::ios::app : std::ios::trunc);
  if (!csv) throw Error(ErrorCode::Io, "cannot write '" + base + ".loss.csv'");
  if (!resume) csv << "step,total,value,normal,edge\n";
  const int every = std::max(1, cfg.train.iterations / 20);
  field::train(state, data, cfg.train, cfg.augment_enabled ? &cfg.augment : nullptr, [&](const field::LossRow& r) {
    csv << field::loss_csv({r}, false);
    if (r.step % every == 0) log << "step " << r.step << " loss " << r.total << "\n";
  });
  write_file(base + ".pafw", field::save_weights(state.params));
  write_file(base + ".state", field::save_state(state));
  log << "wrote " << base << ".pafw at step " << state.step << "\n";
  return kOk;
}

int cmd_reconstruct(const std::string& input, const std::string& checkpoint, const std::string& output,
                    const ProjectConfig& cfg, std::ostream& log, const std::optional<std::string>& image) {
  const auto params = field::load_weights(read_file(checkpoint));
  views::ViewSet set;
  if (fs::path(input).extension() == ".json") {
    set = load_blueprint(input, image);
  } else {
    const auto sheet = img::read_png_gray(read_file(input));
    auto ex = views::extract_views(sheet);
    if (ex.status != views::ExtractStatus::Ok) {
      log << "automatic cutting failed: " << ex.message
          << "\nDraw the view boxes in the review UI (vrecon serve) and reconstruct from the saved JSON.\n";
      return kNeedsHuman;
    }
    set = std::move(ex.views);
    views::attach_images(set, sheet);
  }
  if (!set.finalized()) {
    log << "views are not fully labelled (front/back and facing need a person).\n"
        << "Confirm them in the review UI (vrecon serve) or edit the JSON descriptor.\n";
    return kNeedsHuman;
  }
  try {
    const auto mesh = recon::reconstruct(set, params, cfg.reconstruct);
    if (mesh.empty()) log << "warning: the field has no surface at iso " << cfg.reconstruct.iso << "\n";
    geometry::save_mesh_file(mesh, output);
    log << "wrote " << output << " (" << mesh.vertices.size() << " vertices, " << mesh.triangles.size() << " triangles)\n";
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SizeMismatch)
      log << e.what() << "\nRescale the blueprint or use a checkpoint trained at a matching max_input_dim.\n";
    throw;
  }
  return kOk;
}

int cmd_eval(const std::string& recon_mesh, const std::string& truth_mesh, std::ostream& out, std::size_t samples,
             int resolution, bool raw_truth) {
  const auto truth = raw_truth ? geometry::load_mesh_file(truth_mesh) : load_normalized(truth_mesh);
  const auto m = recon::eval_metrics(geometry::load_mesh_file(recon_mesh), truth, samples, resolution);
  nlohmann::json j{{"iou", m.iou}, {"chamfer", m.chamfer}};
  out << j.dump() << "\n";
  return kOk;
}

}  // namespace vrecon::pipeline
