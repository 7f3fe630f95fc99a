#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vrecon::field {

struct EncoderConfig {
  int stacks = 2;
  int initial_downsample_steps = 1;
  int internal_downsample_steps = 5;
  int feature_depth = 128;
  int max_input_dim = 512;

  int downsample_factor() const { return 1 << initial_downsample_steps; }
  // Smallest image side the encoder accepts.
  int min_input_dim() const;
  void validate() const;  // throws Invalid
  bool operator==(const EncoderConfig&) const = default;
};

struct MlpConfig {
  std::vector<int> hidden{256, 128, 64};
  bool operator==(const MlpConfig&) const = default;
};

struct FieldConfig {
  EncoderConfig encoder;
  MlpConfig mlp;
  std::uint64_t init_seed = 0;
  void validate() const;
  bool operator==(const FieldConfig&) const = default;
};

// The small setting the tests and the overfit run use.
FieldConfig toy_field_config();

enum class Optimizer { Sgd, Adam };

struct TrainConfig {
  double learning_rate = 0.01;
  int iterations = 2000;
  double lambda_value = 1.0;
  double lambda_normal = 0.1;
  double lambda_edge = 0.1;
  int batch_size = 1;           // blueprints per step; only 1 is supported
  int samples_per_step = 512;   // minibatch drawn from that blueprint's samples
  Optimizer optimizer = Optimizer::Sgd;
  double momentum = 0.9;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

const char* to_string(Optimizer o);
Optimizer optimizer_from_string(const std::string& s);

}  // namespace vrecon::field
