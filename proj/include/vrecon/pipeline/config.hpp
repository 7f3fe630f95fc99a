#pragma once

#include <string>
#include <vector>

#include "vrecon/field/config.hpp"
#include "vrecon/recon/reconstruct.hpp"
#include "vrecon/sampling/config.hpp"
#include "vrecon/views/augment.hpp"
#include "vrecon/views/synth.hpp"

namespace vrecon::pipeline {

struct Paths {
  std::string blueprints = "data/blueprints";  // synth output, train input
  std::string samples = "data/samples";        // prep output, train input
  std::string checkpoints = "checkpoints";
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store = "data/service";
  std::size_t max_upload_bytes = 20u << 20;
  int queue_depth = 16;
  std::string cors_origin = "*";
};

struct ProjectConfig {
  Paths paths;
  sampling::SamplerConfig sampler;
  // rendered at the encoder's native size so synth output trains as is
  views::SynthConfig synth{512, 16, 0.05};
  bool augment_enabled = false;
  views::AugmentConfig augment;
  field::FieldConfig field;
  field::TrainConfig train;
  std::string checkpoint_name = "model";
  recon::ReconstructConfig reconstruct;
  ServiceConfig service;

  void validate() const;  // throws Invalid
};

// YAML text with every key present; the inverse of parse_config.
std::string to_yaml(const ProjectConfig& cfg);

// Keys missing from `text` keep their defaults; unknown keys, wrong types and
// out-of-range values throw Invalid naming the key. `overrides` are
// "dotted.key=value" strings applied on top, value parsed as YAML.
ProjectConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
ProjectConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

}  // namespace vrecon::pipeline
