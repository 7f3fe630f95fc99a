#include "vrecon/service/store.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vrecon/core/binary_io.hpp"
#include "vrecon/core/error.hpp"
#include "vrecon/img/png_io.hpp"
#include "vrecon/views/extract.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace vrecon::service {

namespace {

std::optional<std::string> read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// write-then-rename so a crash never leaves half a file
void write_atomic(const fs::path& p, const std::string& text) {
  const fs::path tmp = p.string() + ".tmp";
  write_text_file(tmp.string(), text);
  fs::rename(tmp, p);
}

std::optional<json> read_json(const fs::path& p) {
  auto t = read_text(p);
  if (!t) return std::nullopt;
  return json::parse(*t);
}

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 32) return false;
  for (char c : id)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') return false;
  return true;
}

std::int64_t scan_next(const fs::path& dir, char prefix) {
  std::int64_t next = 1;
  if (!fs::is_directory(dir)) return next;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.size() > 2 && name[0] == prefix && name[1] == '-') {
      try {
        next = std::max<std::int64_t>(next, std::stoll(name.substr(2)) + 1);
      } catch (const std::exception&) {
      }
    }
  }
  return next;
}

}  // namespace

Store::Store(std::string root) : root_(std::move(root)) {
  fs::create_directories(fs::path(root_) / "blueprints");
  fs::create_directories(fs::path(root_) / "jobs");
  next_blueprint_ = scan_next(fs::path(root_) / "blueprints", 'b');
  next_job_ = scan_next(fs::path(root_) / "jobs", 'j');
}

std::string Store::bp_dir(const std::string& id) const { return (fs::path(root_) / "blueprints" / id).string(); }
std::string Store::job_dir(const std::string& id) const { return (fs::path(root_) / "jobs" / id).string(); }

std::mutex& Store::lock_for(const std::string& key) const {
  std::lock_guard<std::mutex> g(table_mutex_);
  auto& m = locks_[key];
  if (!m) m = std::make_unique<std::mutex>();
  return *m;
}

Store::Created Store::create_blueprint(const std::vector<std::uint8_t>& png) {
  const auto image = img::read_png_gray(png);
  const auto ex = views::extract_views(image);
  views::ViewSet auto_set;
  if (ex.status == views::ExtractStatus::Ok) {
    auto_set = ex.views;
  } else {
    // ties still come with candidate boxes worth showing
    for (const auto& b : ex.candidates) auto_set.views.push_back({{}, b, {}, {}, {}});
  }
  auto_set.source_width = image.width;
  auto_set.source_height = image.height;
  json auto_doc = views::to_json(auto_set);
  auto_doc["extraction"] = {{"status", ex.status == views::ExtractStatus::Ok               ? "ok"
                                       : ex.status == views::ExtractStatus::TieUnresolved ? "tie_unresolved"
                                                                                          : "manual_required"},
                            {"method", ex.method},
                            {"message", ex.message}};
  std::string id;
  {
    std::lock_guard<std::mutex> g(id_mutex_);
    id = "b-" + std::to_string(next_blueprint_++);
    fs::create_directories(bp_dir(id));
  }
  const fs::path dir = bp_dir(id);
  write_file((dir / "original.png").string(), png);
  write_atomic(dir / "auto.json", auto_doc.dump());
  write_atomic(dir / "revision", "0");
  return {id, *blueprint(id)};
}

std::optional<json> Store::blueprint(const std::string& id) const {
  if (!valid_id(id) || !fs::is_directory(bp_dir(id))) return std::nullopt;
  std::lock_guard<std::mutex> g(lock_for(id));
  const fs::path dir = bp_dir(id);
  auto auto_doc = read_json(dir / "auto.json");
  if (!auto_doc) return std::nullopt;
  const auto views = read_json(dir / "views.json");
  const auto rev = read_text(dir / "revision");
  json extraction = (*auto_doc)["extraction"];
  auto_doc->erase("extraction");
  return json{{"id", id},
              {"status", views ? "finalized" : "needs_review"},
              {"revision", rev ? std::stoll(*rev) : 0},
              {"source_size", (*auto_doc)["source_size"]},
              {"auto_views", *auto_doc},
              {"extraction", extraction},
              {"views", views ? *views : json(nullptr)}};
}

std::optional<std::vector<std::uint8_t>> Store::original(const std::string& id) const {
  if (!valid_id(id)) return std::nullopt;
  const auto p = fs::path(bp_dir(id)) / "original.png";
  if (!fs::exists(p)) return std::nullopt;
  return read_file(p.string());
}

Store::PutResult Store::put_views(const std::string& id, const json& doc) {
  PutResult r;
  auto rec = blueprint(id);
  if (!rec) return r;
  r.found = true;
  const int w = (*rec)["source_size"]["width"], h = (*rec)["source_size"]["height"];
  r.errors = views::validate_descriptor(doc, w, h);
  if (doc.is_object() && doc.contains("source_size") && doc["source_size"].is_object() &&
      (doc["source_size"].value("width", w) != w || doc["source_size"].value("height", h) != h))
    r.errors.push_back({"source_size", "does not match the uploaded image"});
  if (!r.errors.empty()) return r;
  auto set = views::viewset_from_json(doc);
  set.source_width = w;
  set.source_height = h;
  const json canonical = views::to_json(set);
  {
    std::lock_guard<std::mutex> g(lock_for(id));
    const fs::path dir = bp_dir(id);
    const auto old = read_json(dir / "views.json");
    if (!old || *old != canonical) {
      const auto rev = read_text(dir / "revision");
      write_atomic(dir / "views.json", canonical.dump());
      write_atomic(dir / "revision", std::to_string((rev ? std::stoll(*rev) : 0) + 1));
    }
  }
  r.record = *blueprint(id);
  return r;
}

std::optional<views::ViewSet> Store::finalized_views(const std::string& id) const {
  auto rec = blueprint(id);
  if (!rec || (*rec)["views"].is_null()) return std::nullopt;
  auto set = views::viewset_from_json((*rec)["views"]);
  views::attach_images(set, img::read_png_gray(*original(id)));
  return set;
}

const char* Store::to_string(JobState s) {
  switch (s) {
    case JobState::Queued: return "queued";
    case JobState::Running: return "running";
    case JobState::Done: return "done";
    case JobState::Failed: return "failed";
  }
  return "failed";
}

json Store::to_json(const Job& j) {
  json out{{"id", j.id},
           {"blueprint", j.blueprint},
           {"checkpoint", j.checkpoint},
           {"iso", j.config.iso},
           {"resolution", j.config.resolution},
           {"keep_largest", j.config.keep_largest},
           {"state", to_string(j.state)},
           {"seq", j.seq}};
  if (!j.error.empty()) out["error"] = j.error;
  return out;
}

void Store::write_job(const Job& j) const { write_atomic(fs::path(job_dir(j.id)) / "job.json", to_json(j).dump()); }

std::optional<Store::Job> Store::read_job(const std::string& id) const {
  if (!valid_id(id)) return std::nullopt;
  auto doc = read_json(fs::path(job_dir(id)) / "job.json");
  if (!doc) return std::nullopt;
  Job j;
  j.id = (*doc)["id"];
  j.blueprint = (*doc)["blueprint"];
  j.checkpoint = (*doc)["checkpoint"];
  j.config.iso = (*doc)["iso"];
  j.config.resolution = (*doc)["resolution"];
  j.config.keep_largest = (*doc)["keep_largest"];
  j.seq = (*doc)["seq"];
  j.error = doc->value("error", std::string());
  const std::string s = (*doc)["state"];
  for (JobState st : {JobState::Queued, JobState::Running, JobState::Done, JobState::Failed})
    if (s == to_string(st)) j.state = st;
  return j;
}

Store::Job Store::create_job(const std::string& blueprint, const std::string& checkpoint,
                             const recon::ReconstructConfig& cfg) {
  Job j;
  j.blueprint = blueprint;
  j.checkpoint = checkpoint;
  j.config = cfg;
  {
    std::lock_guard<std::mutex> g(id_mutex_);
    j.seq = next_job_++;
    j.id = "j-" + std::to_string(j.seq);
    fs::create_directories(job_dir(j.id));
  }
  write_job(j);
  return j;
}

std::optional<Store::Job> Store::job(const std::string& id) const {
  if (!valid_id(id)) return std::nullopt;
  std::lock_guard<std::mutex> g(lock_for(id));
  return read_job(id);
}

std::vector<Store::Job> Store::jobs() const {
  std::vector<Job> out;
  for (const auto& e : fs::directory_iterator(fs::path(root_) / "jobs"))
    if (auto j = job(e.path().filename().string())) out.push_back(*j);
  std::sort(out.begin(), out.end(), [](const Job& a, const Job& b) { return a.seq < b.seq; });
  return out;
}

void Store::set_job_state(const std::string& id, JobState s, const std::string& error) {
  std::lock_guard<std::mutex> g(lock_for(id));
  auto j = read_job(id);
  if (!j) throw Error(ErrorCode::Invalid, "unknown job " + id);
  // forward only
  if (static_cast<int>(s) <= static_cast<int>(j->state) || j->state == JobState::Done || j->state == JobState::Failed)
    throw Error(ErrorCode::Invalid, std::string("job ") + id + " cannot go from " + to_string(j->state) + " to " + to_string(s));
  j->state = s;
  j->error = error;
  write_job(*j);
}

void Store::set_job_mesh(const std::string& id, const std::string& obj) {
  std::lock_guard<std::mutex> g(lock_for(id));
  write_atomic(fs::path(job_dir(id)) / "mesh.obj", obj);
}

std::optional<std::string> Store::job_mesh(const std::string& id) const {
  if (!valid_id(id)) return std::nullopt;
  std::lock_guard<std::mutex> g(lock_for(id));
  return read_text(fs::path(job_dir(id)) / "mesh.obj");
}

std::vector<std::string> Store::recover_jobs() {
  std::vector<std::string> queued;
  for (const auto& j : jobs()) {
    if (j.state == JobState::Running) set_job_state(j.id, JobState::Failed, "service restarted while the job was running");
    if (j.state == JobState::Queued) queued.push_back(j.id);
  }
  return queued;
}

}  // namespace vrecon::service
