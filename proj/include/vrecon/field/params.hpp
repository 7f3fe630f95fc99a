#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vrecon/field/config.hpp"

namespace vrecon::field {

struct ConvSpec {
  int cin = 0, cout = 0, stride = 1;
};

// Where every tensor lives. Declaration order: the four view encoders
// (front, back, side, top), each as initial convs then per stack the
// hourglass blocks deepest-last; then the MLP layers. Weight before bias.
struct Layout {
  std::vector<ConvSpec> convs;  // one encoder's convs, shared by all four
  std::array<int, 4> encoder_base{};  // tensor index of each encoder's first conv weight
  int mlp_base = 0;
  std::vector<int> mlp_sizes;  // input, hidden..., 5
  std::vector<std::string> names;
  std::vector<std::size_t> sizes;

  int conv_weight(int view, int conv) const { return encoder_base[view] + 2 * conv; }
  int mlp_weight(int layer) const { return mlp_base + 2 * layer; }
  int mlp_input() const { return mlp_sizes.front(); }
};

Layout make_layout(const FieldConfig& cfg);

// Index of a conv inside one encoder's list.
int initial_conv(const EncoderConfig& enc, int step);
// role: 0 = skip ("up"), 1 = before the lower level, 2 = after it; level runs
// from internal_downsample_steps (outermost) down to 1.
int block_conv(const EncoderConfig& enc, int stack, int level, int role);
int bottom_conv(const EncoderConfig& enc, int stack);

struct ParamSet {
  FieldConfig config;
  std::vector<std::vector<float>> tensors;
  std::size_t count() const;
};

// Deterministic in cfg.init_seed.
ParamSet init_params(const FieldConfig& cfg);

// "PAFW", u32 version, config block, u64 parameter count, then float32
// tensors in declaration order.
std::vector<std::uint8_t> save_weights(const ParamSet& params);
// Throws DecodeError on malformed bytes and ConfigMismatch when `expected`
// is given and differs from the stored configuration.
ParamSet load_weights(const std::vector<std::uint8_t>& bytes,
                      const std::optional<FieldConfig>& expected = std::nullopt);

}  // namespace vrecon::field
