#include "vrecon/pipeline/config.hpp"

#include <yaml-cpp/yaml.h>

#include <functional>
#include <map>
#include <sstream>

#include "vrecon/core/binary_io.hpp"
#include "vrecon/core/error.hpp"

namespace vrecon::pipeline {

namespace {

// One entry per leaf key. Reading goes through YAML's own conversions so
// "1e-3" and "true" behave as a user expects.
struct Binding {
  std::function<YAML::Node(const ProjectConfig&)> get;
  std::function<void(ProjectConfig&, const YAML::Node&)> set;
};

template <class T, class M>
Binding bind(M ProjectConfig::*outer, T M::*inner) {
  return {[=](const ProjectConfig& c) { return YAML::Node((c.*outer).*inner); },
          [=](ProjectConfig& c, const YAML::Node& n) { (c.*outer).*inner = n.as<T>(); }};
}

template <class T>
Binding bind_top(T ProjectConfig::*m) {
  return {[=](const ProjectConfig& c) { return YAML::Node(c.*m); },
          [=](ProjectConfig& c, const YAML::Node& n) { c.*m = n.as<T>(); }};
}

template <class T, class M>
Binding bind_field(M field::FieldConfig::*mid, T M::*inner) {
  return {[=](const ProjectConfig& c) { return YAML::Node((c.field.*mid).*inner); },
          [=](ProjectConfig& c, const YAML::Node& n) { (c.field.*mid).*inner = n.as<T>(); }};
}

// ordered so the emitted file reads top to bottom like the pipeline
const std::vector<std::pair<std::string, Binding>>& bindings() {
  using PC = ProjectConfig;
  using SC = sampling::SamplerConfig;
  using TC = field::TrainConfig;
  using EC = field::EncoderConfig;
  static const std::vector<std::pair<std::string, Binding>> b = {
      {"paths.blueprints", bind(&PC::paths, &Paths::blueprints)},
      {"paths.samples", bind(&PC::paths, &Paths::samples)},
      {"paths.checkpoints", bind(&PC::paths, &Paths::checkpoints)},
      {"sampler.n_samples", bind(&PC::sampler, &SC::n_samples)},
      {"sampler.surface_sigma", bind(&PC::sampler, &SC::surface_sigma)},
      {"sampler.uniform_fraction", bind(&PC::sampler, &SC::uniform_fraction)},
      {"sampler.truncation", bind(&PC::sampler, &SC::truncation)},
      {"sampler.hull_resolution", bind(&PC::sampler, &SC::hull_resolution)},
      {"sampler.thickness_angle_threshold", bind(&PC::sampler, &SC::thickness_angle_threshold)},
      {"sampler.edge_floor", bind(&PC::sampler, &SC::edge_floor)},
      {"sampler.hull_dist_normal_floor", bind(&PC::sampler, &SC::hull_dist_normal_floor)},
      {"sampler.dist_floor", bind(&PC::sampler, &SC::dist_floor)},
      {"sampler.thickness_clip", bind(&PC::sampler, &SC::thickness_clip)},
      {"sampler.hull_dist_scale", bind(&PC::sampler, &SC::hull_dist_scale)},
      {"sampler.use_thickness", bind(&PC::sampler, &SC::use_thickness)},
      {"sampler.use_hull_distance", bind(&PC::sampler, &SC::use_hull_distance)},
      {"sampler.scan_cameras", bind(&PC::sampler, &SC::scan_cameras)},
      {"sampler.scan_resolution", bind(&PC::sampler, &SC::scan_resolution)},
      {"sampler.seed", bind(&PC::sampler, &SC::seed)},
      {"synth.resolution", bind(&PC::synth, &views::SynthConfig::resolution)},
      {"synth.gap", bind(&PC::synth, &views::SynthConfig::gap)},
      {"synth.depth_jump", bind(&PC::synth, &views::SynthConfig::depth_jump)},
      {"augment.enabled", bind_top(&PC::augment_enabled)},
      {"augment.noise_amplitude", bind(&PC::augment, &views::AugmentConfig::noise_amplitude)},
      {"augment.block_artifact_strength", bind(&PC::augment, &views::AugmentConfig::block_artifact_strength)},
      {"augment.extra_line_count", bind(&PC::augment, &views::AugmentConfig::extra_line_count)},
      {"augment.window_removal", bind(&PC::augment, &views::AugmentConfig::window_removal)},
      {"augment.seed", bind(&PC::augment, &views::AugmentConfig::seed)},
      {"field.stacks", bind_field(&field::FieldConfig::encoder, &EC::stacks)},
      {"field.initial_downsample_steps", bind_field(&field::FieldConfig::encoder, &EC::initial_downsample_steps)},
      {"field.internal_downsample_steps", bind_field(&field::FieldConfig::encoder, &EC::internal_downsample_steps)},
      {"field.feature_depth", bind_field(&field::FieldConfig::encoder, &EC::feature_depth)},
      {"field.max_input_dim", bind_field(&field::FieldConfig::encoder, &EC::max_input_dim)},
      {"field.hidden", bind_field(&field::FieldConfig::mlp, &field::MlpConfig::hidden)},
      {"field.init_seed", bind(&PC::field, &field::FieldConfig::init_seed)},
      {"train.learning_rate", bind(&PC::train, &TC::learning_rate)},
      {"train.iterations", bind(&PC::train, &TC::iterations)},
      {"train.lambda_value", bind(&PC::train, &TC::lambda_value)},
      {"train.lambda_normal", bind(&PC::train, &TC::lambda_normal)},
      {"train.lambda_edge", bind(&PC::train, &TC::lambda_edge)},
      {"train.samples_per_step", bind(&PC::train, &TC::samples_per_step)},
      {"train.optimizer",
       {[](const PC& c) { return YAML::Node(std::string(field::to_string(c.train.optimizer))); },
        [](PC& c, const YAML::Node& n) { c.train.optimizer = field::optimizer_from_string(n.as<std::string>()); }}},
      {"train.momentum", bind(&PC::train, &TC::momentum)},
      {"train.adam_beta1", bind(&PC::train, &TC::adam_beta1)},
      {"train.adam_beta2", bind(&PC::train, &TC::adam_beta2)},
      {"train.adam_epsilon", bind(&PC::train, &TC::adam_epsilon)},
      {"train.seed", bind(&PC::train, &TC::seed)},
      {"train.checkpoint_name", bind_top(&PC::checkpoint_name)},
      {"reconstruct.resolution", bind(&PC::reconstruct, &recon::ReconstructConfig::resolution)},
      {"reconstruct.iso", bind(&PC::reconstruct, &recon::ReconstructConfig::iso)},
      {"reconstruct.keep_largest", bind(&PC::reconstruct, &recon::ReconstructConfig::keep_largest)},
      {"service.host", bind(&PC::service, &ServiceConfig::host)},
      {"service.port", bind(&PC::service, &ServiceConfig::port)},
      {"service.store", bind(&PC::service, &ServiceConfig::store)},
      {"service.max_upload_bytes", bind(&PC::service, &ServiceConfig::max_upload_bytes)},
      {"service.queue_depth", bind(&PC::service, &ServiceConfig::queue_depth)},
      {"service.cors_origin", bind(&PC::service, &ServiceConfig::cors_origin)},
  };
  return b;
}

const Binding& find_binding(const std::string& key) {
  for (const auto& [k, b] : bindings())
    if (k == key) return b;
  throw Error(ErrorCode::Invalid, "unknown config key '" + key + "'");
}

void apply(ProjectConfig& cfg, const std::string& key, const YAML::Node& value) {
  const auto& b = find_binding(key);
  try {
    b.set(cfg, value);
  } catch (const YAML::Exception&) {
    throw Error(ErrorCode::Invalid, "config key '" + key + "' has a value of the wrong type");
  } catch (const Error& e) {
    throw Error(ErrorCode::Invalid, "config key '" + key + "': " + e.what());
  }
}

// walks nested maps down to leaves; sequences are leaves (field.hidden)
void apply_tree(ProjectConfig& cfg, const YAML::Node& node, const std::string& prefix) {
  if (!node.IsMap()) {
    apply(cfg, prefix, node);
    return;
  }
  for (const auto& kv : node) {
    const std::string key = prefix.empty() ? kv.first.as<std::string>() : prefix + "." + kv.first.as<std::string>();
    if (kv.second.IsMap()) {
      apply_tree(cfg, kv.second, key);
    } else {
      apply(cfg, key, kv.second);
    }
  }
}

}  // namespace

void ProjectConfig::validate() const {
  sampler.validate();
  augment.validate();
  field.validate();
  train.validate();
  reconstruct.validate();
  if (synth.resolution < 4 || synth.gap < 1) throw Error(ErrorCode::Invalid, "synth.resolution >= 4 and synth.gap >= 1 required");
  if (service.port < 0 || service.port > 65535) throw Error(ErrorCode::Invalid, "service.port out of range");
  if (service.queue_depth < 1) throw Error(ErrorCode::Invalid, "service.queue_depth must be at least 1");
  if (checkpoint_name.empty() || checkpoint_name.find('/') != std::string::npos)
    throw Error(ErrorCode::Invalid, "train.checkpoint_name must be a plain file name");
}

std::string to_yaml(const ProjectConfig& cfg) {
  YAML::Node root;
  for (const auto& [key, b] : bindings()) {
    const auto dot = key.find('.');
    YAML::Node v = b.get(cfg);
    // Node(double) keeps max_digits10, which prints 0.1 as 0.10000000000000001
    if (v.IsScalar()) {
      const std::string t = v.Scalar();
      if (t.find_first_of(".e") != std::string::npos && t.find_first_not_of("0123456789.e+-") == std::string::npos) {
        try {
          std::ostringstream os;
          os.precision(15);
          os << v.as<double>();
          v = YAML::Node(os.str());
        } catch (const YAML::BadConversion&) {
          // an address, not a number
        }
      }
    }
    root[key.substr(0, dot)][key.substr(dot + 1)] = v;
  }
  YAML::Emitter out;
  out << root;
  return std::string(out.c_str()) + "\n";
}

ProjectConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  ProjectConfig cfg;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::Invalid, std::string("config is not valid YAML: ") + e.what());
  }
  if (root && !root.IsNull()) {
    if (!root.IsMap()) throw Error(ErrorCode::Invalid, "config must be a mapping of sections");
    apply_tree(cfg, root, "");
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::Invalid, "override '" + o + "' is not key=value");
    YAML::Node v;
    try {
      v = YAML::Load(o.substr(eq + 1));
    } catch (const YAML::ParserException&) {
      throw Error(ErrorCode::Invalid, "override '" + o + "' has an unparsable value");
    }
    apply(cfg, o.substr(0, eq), v);
  }
  cfg.validate();
  return cfg;
}

ProjectConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  const auto bytes = read_file(path);
  return parse_config(std::string(bytes.begin(), bytes.end()), overrides);
}

}  // namespace vrecon::pipeline
