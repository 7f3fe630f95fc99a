#include "vrecon/service/server.hpp"

#include <httplib.h>

#include <filesystem>

#include "vrecon/core/binary_io.hpp"
#include "vrecon/core/error.hpp"
#include "vrecon/field/params.hpp"
#include "vrecon/geometry/mesh_io.hpp"
#include "vrecon/img/png_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace vrecon::service {

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

bool plain_name(const std::string& s) {
  if (s.empty() || s.size() > 128) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') return false;
  return s.front() != '.';
}

json encoder_json(const field::FieldConfig& c) {
  return {{"stacks", c.encoder.stacks},
          {"initial_downsample_steps", c.encoder.initial_downsample_steps},
          {"internal_downsample_steps", c.encoder.internal_downsample_steps},
          {"feature_depth", c.encoder.feature_depth},
          {"max_input_dim", c.encoder.max_input_dim},
          {"hidden", c.mlp.hidden}};
}

std::string checkpoint_path(const std::string& dir, const std::string& id) {
  return (fs::path(dir) / (id + ".pafw")).string();
}

}  // namespace

Server::Server(pipeline::ServiceConfig cfg, std::string checkpoints_dir)
    : cfg_(std::move(cfg)), checkpoints_(std::move(checkpoints_dir)), store_(std::make_unique<Store>(cfg_.store)),
      http_(std::make_unique<httplib::Server>()) {
  routes();
}

Server::~Server() { stop(); }

void Server::routes() {
  auto& s = *http_;
  s.set_payload_max_length(cfg_.max_upload_bytes);
  s.set_default_headers({{"Access-Control-Allow-Origin", cfg_.cors_origin}});
  s.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    } catch (...) {
      send_error(res, 500, "internal error");
    }
  });

  s.Post("/blueprints", [this](const httplib::Request& req, httplib::Response& res) {
    const std::vector<std::uint8_t> body(req.body.begin(), req.body.end());
    if (!img::has_png_signature(body)) return send_error(res, 415, "body must be a PNG image");
    try {
      auto c = store_->create_blueprint(body);
      send_json(res, 201, c.record);
    } catch (const DecodeError& e) {
      send_error(res, 400, std::string("unreadable PNG: ") + e.what());
    }
  });

  s.Get(R"(/blueprints/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    auto rec = store_->blueprint(req.matches[1]);
    if (!rec) return send_error(res, 404, "no such blueprint");
    send_json(res, 200, *rec);
  });

  s.Get(R"(/blueprints/([^/]+)/original\.png)", [this](const httplib::Request& req, httplib::Response& res) {
    auto png = store_->original(req.matches[1]);
    if (!png) return send_error(res, 404, "no such blueprint");
    res.set_content(std::string(png->begin(), png->end()), "image/png");
  });

  s.Put(R"(/blueprints/([^/]+)/views)", [this](const httplib::Request& req, httplib::Response& res) {
    json doc;
    try {
      doc = json::parse(req.body);
    } catch (const json::exception&) {
      return send_error(res, 400, "body is not JSON");
    }
    auto r = store_->put_views(req.matches[1], doc);
    if (!r.found) return send_error(res, 404, "no such blueprint");
    if (!r.errors.empty()) {
      json errs = json::array();
      for (const auto& e : r.errors) errs.push_back({{"field", e.field}, {"message", e.message}});
      return send_json(res, 422, {{"error", "invalid views"}, {"errors", errs}});
    }
    send_json(res, 200, r.record);
  });

  s.Post(R"(/blueprints/([^/]+)/reconstruct)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    json doc = json::object();
    if (!req.body.empty()) {
      try {
        doc = json::parse(req.body);
      } catch (const json::exception&) {
        return send_error(res, 400, "body is not JSON");
      }
    }
    if (!doc.is_object()) return send_error(res, 400, "body must be an object");
    auto rec = store_->blueprint(id);
    if (!rec) return send_error(res, 404, "no such blueprint");
    recon::ReconstructConfig cfg;
    std::string checkpoint;
    json errs = json::array();
    try {
      checkpoint = doc.value("checkpoint", std::string());
      cfg.iso = doc.value("iso", cfg.iso);
      cfg.resolution = doc.value("resolution", cfg.resolution);
      cfg.keep_largest = doc.value("keep_largest", cfg.keep_largest);
    } catch (const json::exception&) {
      return send_error(res, 422, "checkpoint must be a string, iso a number, resolution an integer");
    }
    if (!(cfg.iso > 0 && cfg.iso < 1)) errs.push_back({{"field", "iso"}, {"message", "must be in (0,1)"}});
    if (cfg.resolution < 2 || cfg.resolution > 1024)
      errs.push_back({{"field", "resolution"}, {"message", "must be between 2 and 1024"}});
    if (!errs.empty()) return send_json(res, 422, {{"error", "invalid job settings"}, {"errors", errs}});
    if ((*rec)["views"].is_null()) return send_error(res, 409, "views are not confirmed yet");
    if (!plain_name(checkpoint) || !fs::exists(checkpoint_path(checkpoints_, checkpoint)))
      return send_error(res, 404, "no such checkpoint");
    auto job = store_->create_job(id, checkpoint, cfg);
    if (!enqueue(job.id)) {
      store_->set_job_state(job.id, Store::JobState::Failed, "queue full");
      return send_error(res, 503, "reconstruction queue is full");
    }
    send_json(res, 202, Store::to_json(job));
  });

  s.Get("/jobs", [this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& j : store_->jobs()) out.push_back(Store::to_json(j));
    send_json(res, 200, out);
  });

  s.Get(R"(/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    auto j = store_->job(req.matches[1]);
    if (!j) return send_error(res, 404, "no such job");
    send_json(res, 200, Store::to_json(*j));
  });

  s.Get(R"(/jobs/([^/]+)/mesh\.obj)", [this](const httplib::Request& req, httplib::Response& res) {
    auto j = store_->job(req.matches[1]);
    if (!j) return send_error(res, 404, "no such job");
    if (j->state != Store::JobState::Done) return send_error(res, 409, std::string("job is ") + Store::to_string(j->state));
    auto obj = store_->job_mesh(j->id);
    if (!obj) return send_error(res, 500, "mesh missing for a finished job");
    res.set_content(*obj, "model/obj");
  });

  s.Get("/checkpoints", [this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    std::vector<fs::path> files;
    if (fs::is_directory(checkpoints_))
      for (const auto& e : fs::directory_iterator(checkpoints_))
        if (e.path().extension() == ".pafw") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      try {
        const auto p = field::load_weights(read_file(f.string()));
        out.push_back({{"id", f.stem().string()}, {"encoder", encoder_json(p.config)}, {"parameters", p.count()}});
      } catch (const Error&) {
        // unreadable files are not offered
      }
    }
    send_json(res, 200, out);
  });
}

bool Server::enqueue(const std::string& id) {
  {
    std::lock_guard<std::mutex> g(queue_mutex_);
    if (static_cast<int>(queue_.size()) >= cfg_.queue_depth) return false;
    queue_.push_back(id);
  }
  queue_cv_.notify_one();
  return true;
}

void Server::run_job(const std::string& id) {
  auto j = store_->job(id);
  if (!j || j->state != Store::JobState::Queued) return;
  store_->set_job_state(id, Store::JobState::Running);
  try {
    auto set = store_->finalized_views(j->blueprint);
    if (!set) throw Error(ErrorCode::UnresolvedViews, "blueprint views are not confirmed");
    const auto params = field::load_weights(read_file(checkpoint_path(checkpoints_, j->checkpoint)));
    const auto mesh = recon::reconstruct(*set, params, j->config);
    const auto obj = geometry::save_mesh(mesh, geometry::MeshFormat::Obj);
    store_->set_job_mesh(id, std::string(obj.begin(), obj.end()));
    store_->set_job_state(id, Store::JobState::Done);
  } catch (const std::exception& e) {
    store_->set_job_state(id, Store::JobState::Failed, e.what());
  }
}

void Server::worker_loop() {
  for (;;) {
    std::string id;
    {
      std::unique_lock<std::mutex> g(queue_mutex_);
      queue_cv_.wait(g, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      id = queue_.front();
      queue_.pop_front();
    }
    run_job(id);
  }
}

int Server::start() {
  if (!started_worker_) {
    for (const auto& id : store_->recover_jobs()) {
      std::lock_guard<std::mutex> g(queue_mutex_);
      queue_.push_back(id);
    }
    worker_ = std::thread([this] { worker_loop(); });
    started_worker_ = true;
  }
  int port = cfg_.port;
  if (port == 0) {
    port = http_->bind_to_any_port(cfg_.host);
  } else if (!http_->bind_to_port(cfg_.host, port)) {
    port = -1;
  }
  if (port < 0) throw Error(ErrorCode::Io, "cannot listen on " + cfg_.host + ":" + std::to_string(cfg_.port));
  listener_ = std::thread([this] { http_->listen_after_bind(); });
  return port;
}

void Server::run() {
  start();
  if (listener_.joinable()) listener_.join();
}

void Server::stop() {
  if (http_) http_->stop();
  if (listener_.joinable() && listener_.get_id() != std::this_thread::get_id()) listener_.join();
  {
    std::lock_guard<std::mutex> g(queue_mutex_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

}  // namespace vrecon::service
