#pragma once

#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "vrecon/pipeline/config.hpp"
#include "vrecon/service/store.hpp"

namespace httplib {
class Server;
}

namespace vrecon::service {

// HTTP front of the store plus one FIFO reconstruction worker.
class Server {
 public:
  Server(pipeline::ServiceConfig cfg, std::string checkpoints_dir);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds cfg.host:cfg.port (0 picks a free port) and serves on a background
  // thread; returns the bound port. Throws Io when binding fails.
  int start();
  // Blocks serving on the calling thread.
  void run();
  void stop();

  Store& store() { return *store_; }

 private:
  void routes();
  void worker_loop();
  void run_job(const std::string& id);
  bool enqueue(const std::string& id);

  pipeline::ServiceConfig cfg_;
  std::string checkpoints_;
  std::unique_ptr<Store> store_;
  std::unique_ptr<httplib::Server> http_;
  std::thread listener_, worker_;
  std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  std::deque<std::string> queue_;
  bool stopping_ = false;
  bool started_worker_ = false;
};

}  // namespace vrecon::service
