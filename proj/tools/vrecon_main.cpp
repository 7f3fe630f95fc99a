// vrecon: prep, synth, train, reconstruct, eval, serve.
#include <CLI11.hpp>

#include <csignal>
#include <iostream>

#include "vrecon/pipeline/commands.hpp"
#include "vrecon/service/server.hpp"

using namespace vrecon;

namespace {

service::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blueprint to mesh reconstruction toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config_path, "YAML config file (defaults when omitted)");
  app.add_option("--set", overrides, "override a config key, e.g. --set train.iterations=500")->take_all();

  std::vector<std::string> prep_meshes, synth_meshes;
  auto* prep = app.add_subcommand("prep", "scan meshes and write SDF sample files");
  prep->add_option("meshes", prep_meshes, "OBJ/STL/PLY meshes");
  auto* synth = app.add_subcommand("synth", "render meshes into four-view blueprints");
  synth->add_option("meshes", synth_meshes, "OBJ/STL/PLY meshes");

  bool resume = false;
  auto* train = app.add_subcommand("train", "train the field on blueprints paired with sample files");
  train->add_flag("--resume", resume, "continue from the saved training state");

  std::string input, checkpoint, output, image;
  std::optional<double> iso;
  std::optional<int> resolution;
  auto* rec = app.add_subcommand("reconstruct", "reconstruct a mesh from a blueprint");
  rec->add_option("input", input, "blueprint PNG or view descriptor JSON")->required();
  rec->add_option("-w,--weights", checkpoint, "checkpoint (.pafw)")->required();
  rec->add_option("-o,--output", output, "mesh to write (.obj, .stl, .ply)")->required();
  rec->add_option("--image", image, "sheet PNG for a JSON descriptor (default: same stem)");
  rec->add_option("--iso", iso, "extraction threshold");
  rec->add_option("--resolution", resolution, "grid cells along X");

  std::string recon_mesh, truth_mesh;
  std::size_t eval_samples = 20000;
  int eval_res = 128;
  auto* eval = app.add_subcommand("eval", "IoU and Chamfer distance between two meshes");
  eval->add_option("reconstruction", recon_mesh)->required();
  eval->add_option("truth", truth_mesh)->required();
  eval->add_option("--samples", eval_samples, "surface points per mesh");
  eval->add_option("--grid", eval_res, "IoU lattice cells along the longest axis");
  bool raw_truth = false;
  eval->add_flag("--raw", raw_truth, "compare against the truth mesh as stored, not normalized");

  std::string host;
  std::optional<int> port;
  auto* serve = app.add_subcommand("serve", "run the HTTP review and reconstruction service");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port (0 picks one)");

  app.add_subcommand("config", "print the effective configuration as YAML");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : pipeline::kInvalidInput;
  }

  try {
    if (iso) overrides.push_back("reconstruct.iso=" + std::to_string(*iso));
    if (resolution) overrides.push_back("reconstruct.resolution=" + std::to_string(*resolution));
    if (!host.empty()) overrides.push_back("service.host=" + host);
    if (port) overrides.push_back("service.port=" + std::to_string(*port));
    const auto cfg = config_path.empty() ? pipeline::parse_config("", overrides) : pipeline::load_config(config_path, overrides);

    if (app.got_subcommand("config")) {
      std::cout << pipeline::to_yaml(cfg);
      return 0;
    }
    if (*prep) return pipeline::cmd_prep(prep_meshes, cfg, std::cerr);
    if (*synth) return pipeline::cmd_synth(synth_meshes, cfg, std::cerr);
    if (*train) return pipeline::cmd_train(cfg, resume, std::cerr);
    if (*rec)
      return pipeline::cmd_reconstruct(input, checkpoint, output, cfg, std::cerr,
                                       image.empty() ? std::nullopt : std::optional<std::string>(image));
    if (*eval) return pipeline::cmd_eval(recon_mesh, truth_mesh, std::cout, eval_samples, eval_res, raw_truth);
    if (*serve) {
      service::Server server(cfg.service, cfg.paths.checkpoints);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "serving on " << cfg.service.host << ":" << cfg.service.port << "\n";
      server.run();
      g_server = nullptr;
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return pipeline::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return pipeline::kInternal;
  }
  return 0;
}
