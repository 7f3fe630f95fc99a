#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vrecon/recon/reconstruct.hpp"
#include "vrecon/views/json.hpp"

namespace vrecon::service {

// Directory per blueprint under <root>/blueprints/<id>:
//   original.png, auto.json (cut result), views.json (confirmed), revision
// and per job under <root>/jobs/<id>: job.json, mesh.obj once done.
class Store {
 public:
  explicit Store(std::string root);

  struct Created {
    std::string id;
    nlohmann::json record;
  };
  // Decodes, cuts and persists. Throws DecodeError for a broken PNG.
  Created create_blueprint(const std::vector<std::uint8_t>& png);

  std::optional<nlohmann::json> blueprint(const std::string& id) const;
  std::optional<std::vector<std::uint8_t>> original(const std::string& id) const;

  struct PutResult {
    bool found = false;
    std::vector<views::FieldError> errors;
    nlohmann::json record;
  };
  // Validates and stores confirmed views; the revision only moves when the
  // stored views change.
  PutResult put_views(const std::string& id, const nlohmann::json& doc);

  // Finalized view set with images attached; nullopt when not confirmed yet.
  std::optional<views::ViewSet> finalized_views(const std::string& id) const;

  enum class JobState { Queued, Running, Done, Failed };
  struct Job {
    std::string id, blueprint, checkpoint;
    recon::ReconstructConfig config;
    JobState state = JobState::Queued;
    std::string error;
    std::int64_t seq = 0;
  };
  Job create_job(const std::string& blueprint, const std::string& checkpoint, const recon::ReconstructConfig& cfg);
  std::optional<Job> job(const std::string& id) const;
  std::vector<Job> jobs() const;  // creation order
  void set_job_state(const std::string& id, JobState s, const std::string& error = {});
  void set_job_mesh(const std::string& id, const std::string& obj);
  std::optional<std::string> job_mesh(const std::string& id) const;

  // Jobs left Queued by a previous process, in creation order. Jobs that were
  // Running are marked Failed since their work was lost.
  std::vector<std::string> recover_jobs();

  static const char* to_string(JobState s);
  static nlohmann::json to_json(const Job& j);

 private:
  std::string bp_dir(const std::string& id) const;
  std::string job_dir(const std::string& id) const;
  std::mutex& lock_for(const std::string& key) const;
  void write_job(const Job& j) const;
  std::optional<Job> read_job(const std::string& id) const;
  std::string next_id(const char* prefix, const std::string& dir);

  std::string root_;
  mutable std::mutex table_mutex_;
  mutable std::map<std::string, std::unique_ptr<std::mutex>> locks_;
  std::mutex id_mutex_;
  std::int64_t next_blueprint_ = 1, next_job_ = 1;
};

}  // namespace vrecon::service
