#include "vrecon/field/config.hpp"

#include <algorithm>

#include "vrecon/core/error.hpp"

namespace vrecon::field {

int EncoderConfig::min_input_dim() const { return std::max(3, downsample_factor()); }

void EncoderConfig::validate() const {
  if (stacks < 1 || initial_downsample_steps < 1 || internal_downsample_steps < 1 || feature_depth < 1)
    throw Error(ErrorCode::Invalid, "encoder counts must all be at least 1");
  if (initial_downsample_steps > 8 || internal_downsample_steps > 12)
    throw Error(ErrorCode::Invalid, "encoder downsampling chain is too deep");
  if (max_input_dim < min_input_dim())
    throw Error(ErrorCode::Invalid, "max_input_dim is below the encoder minimum of " + std::to_string(min_input_dim()));
}

void FieldConfig::validate() const {
  encoder.validate();
  for (int h : mlp.hidden)
    if (h < 1) throw Error(ErrorCode::Invalid, "MLP hidden widths must be positive");
}

FieldConfig toy_field_config() {
  FieldConfig c;
  c.encoder.stacks = 1;
  c.encoder.initial_downsample_steps = 1;
  c.encoder.internal_downsample_steps = 3;
  c.encoder.feature_depth = 8;
  c.encoder.max_input_dim = 64;
  c.mlp.hidden = {128, 64};
  return c;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0)) throw Error(ErrorCode::Invalid, "learning rate must be non-negative");
  if (iterations < 0) throw Error(ErrorCode::Invalid, "iterations must be non-negative");
  if (lambda_value < 0 || lambda_normal < 0 || lambda_edge < 0)
    throw Error(ErrorCode::Invalid, "loss weights must be non-negative");
  if (batch_size != 1) throw Error(ErrorCode::Invalid, "batch size is fixed at one blueprint per step");
  if (samples_per_step < 1) throw Error(ErrorCode::Invalid, "samples_per_step must be positive");
  if (!(momentum >= 0 && momentum < 1)) throw Error(ErrorCode::Invalid, "momentum must lie in [0,1)");
}

const char* to_string(Optimizer o) { return o == Optimizer::Adam ? "adam" : "sgd"; }

Optimizer optimizer_from_string(const std::string& s) {
  if (s == "sgd") return Optimizer::Sgd;
  if (s == "adam") return Optimizer::Adam;
  throw Error(ErrorCode::Invalid, "unknown optimizer '" + s + "'");
}

}  // namespace vrecon::field
