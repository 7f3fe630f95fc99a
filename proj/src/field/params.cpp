#include "vrecon/field/params.hpp"

#include <cmath>

#include "vrecon/core/binary_io.hpp"
#include "vrecon/core/random.hpp"

namespace vrecon::field {

namespace {
constexpr const char* kViewNames[4] = {"front", "back", "side", "top"};
constexpr std::uint32_t kCheckpointVersion = 1;
constexpr int kOutputs = 5;  // value, normal xyz, edge
}  // namespace

int initial_conv(const EncoderConfig&, int step) { return step; }

int block_conv(const EncoderConfig& enc, int stack, int level, int role) {
  const int d = enc.internal_downsample_steps;
  return enc.initial_downsample_steps + stack * (3 * d + 1) + (d - level) * 3 + role;
}

int bottom_conv(const EncoderConfig& enc, int stack) {
  const int d = enc.internal_downsample_steps;
  return enc.initial_downsample_steps + stack * (3 * d + 1) + 3 * d;
}

Layout make_layout(const FieldConfig& cfg) {
  cfg.validate();
  const auto& e = cfg.encoder;
  const int c = e.feature_depth;
  Layout l;
  for (int i = 0; i < e.initial_downsample_steps; ++i) l.convs.push_back({i == 0 ? 1 : c, c, 2});
  for (int s = 0; s < e.stacks; ++s)
    for (int k = 0; k < 3 * e.internal_downsample_steps + 1; ++k) l.convs.push_back({c, c, 1});
  for (int v = 0; v < 4; ++v) {
    l.encoder_base[v] = static_cast<int>(l.names.size());
    for (std::size_t k = 0; k < l.convs.size(); ++k) {
      const auto& cv = l.convs[k];
      const std::string base = std::string(kViewNames[v]) + ".conv" + std::to_string(k);
      l.names.push_back(base + ".weight");
      l.sizes.push_back(static_cast<std::size_t>(cv.cout) * cv.cin * 9);
      l.names.push_back(base + ".bias");
      l.sizes.push_back(static_cast<std::size_t>(cv.cout));
    }
  }
  l.mlp_base = static_cast<int>(l.names.size());
  l.mlp_sizes.push_back(4 * c + 3);
  for (int h : cfg.mlp.hidden) l.mlp_sizes.push_back(h);
  l.mlp_sizes.push_back(kOutputs);
  for (std::size_t k = 0; k + 1 < l.mlp_sizes.size(); ++k) {
    l.names.push_back("mlp" + std::to_string(k) + ".weight");
    l.sizes.push_back(static_cast<std::size_t>(l.mlp_sizes[k + 1]) * l.mlp_sizes[k]);
    l.names.push_back("mlp" + std::to_string(k) + ".bias");
    l.sizes.push_back(static_cast<std::size_t>(l.mlp_sizes[k + 1]));
  }
  return l;
}

std::size_t ParamSet::count() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.size();
  return n;
}

ParamSet init_params(const FieldConfig& cfg) {
  const Layout l = make_layout(cfg);
  ParamSet p;
  p.config = cfg;
  p.tensors.resize(l.names.size());
  auto fill = [&](int index, double bound) {
    Rng rng(derive_seed(cfg.init_seed, static_cast<std::uint64_t>(index)));
    auto& t = p.tensors[static_cast<std::size_t>(index)];
    t.resize(l.sizes[static_cast<std::size_t>(index)]);
    for (auto& x : t) x = static_cast<float>((2 * uniform01(rng) - 1) * bound);
  };
  for (int v = 0; v < 4; ++v)
    for (std::size_t k = 0; k < l.convs.size(); ++k) {
      const auto& cv = l.convs[k];
      // residual branches start small so each block begins near identity
      const double gain = cv.stride == 2 ? 1.0 : 0.5;
      const int w = l.conv_weight(v, static_cast<int>(k));
      fill(w, gain * std::sqrt(6.0 / (9.0 * (cv.cin + cv.cout))));
      p.tensors[static_cast<std::size_t>(w + 1)].assign(static_cast<std::size_t>(cv.cout), 0.0f);
    }
  const int layers = static_cast<int>(l.mlp_sizes.size()) - 1;
  for (int k = 0; k < layers; ++k) {
    const double fan = l.mlp_sizes[k] + l.mlp_sizes[k + 1];
    fill(l.mlp_weight(k), (k + 1 == layers ? 0.1 : 1.0) * std::sqrt(6.0 / fan));
    p.tensors[static_cast<std::size_t>(l.mlp_weight(k) + 1)].assign(static_cast<std::size_t>(l.mlp_sizes[k + 1]), 0.0f);
  }
  return p;
}

std::vector<std::uint8_t> save_weights(const ParamSet& params) {
  const Layout l = make_layout(params.config);
  if (params.tensors.size() != l.sizes.size()) throw Error(ErrorCode::Invalid, "parameter set does not match its layout");
  ByteWriter w;
  w.tag("PAFW");
  w.u32(kCheckpointVersion);
  const auto& e = params.config.encoder;
  w.u32(static_cast<std::uint32_t>(e.stacks));
  w.u32(static_cast<std::uint32_t>(e.initial_downsample_steps));
  w.u32(static_cast<std::uint32_t>(e.internal_downsample_steps));
  w.u32(static_cast<std::uint32_t>(e.feature_depth));
  w.u32(static_cast<std::uint32_t>(e.max_input_dim));
  w.u32(static_cast<std::uint32_t>(params.config.mlp.hidden.size()));
  for (int h : params.config.mlp.hidden) w.u32(static_cast<std::uint32_t>(h));
  w.u64(params.config.init_seed);
  w.u64(params.count());
  for (std::size_t i = 0; i < params.tensors.size(); ++i) {
    if (params.tensors[i].size() != l.sizes[i]) throw Error(ErrorCode::Invalid, "tensor " + l.names[i] + " has the wrong size");
    w.bytes(params.tensors[i].data(), params.tensors[i].size() * sizeof(float));
  }
  return w.take();
}

ParamSet load_weights(const std::vector<std::uint8_t>& bytes, const std::optional<FieldConfig>& expected) {
  ByteReader r(bytes);
  r.expect_tag("PAFW");
  const std::size_t at = r.offset();
  const auto version = r.u32();
  if (version != kCheckpointVersion) throw DecodeError("unsupported checkpoint version " + std::to_string(version), at);
  ParamSet p;
  auto& e = p.config.encoder;
  e.stacks = static_cast<int>(r.u32());
  e.initial_downsample_steps = static_cast<int>(r.u32());
  e.internal_downsample_steps = static_cast<int>(r.u32());
  e.feature_depth = static_cast<int>(r.u32());
  e.max_input_dim = static_cast<int>(r.u32());
  const auto layers = r.u32();
  if (layers > 64) throw DecodeError("implausible MLP depth", r.offset());
  p.config.mlp.hidden.clear();
  for (std::uint32_t i = 0; i < layers; ++i) p.config.mlp.hidden.push_back(static_cast<int>(r.u32()));
  p.config.init_seed = r.u64();
  Layout l;
  try {
    l = make_layout(p.config);
  } catch (const Error& err) {
    throw DecodeError(std::string("invalid stored configuration: ") + err.what(), at);
  }
  if (expected && !(expected->encoder == p.config.encoder && expected->mlp == p.config.mlp))
    throw Error(ErrorCode::ConfigMismatch, "checkpoint configuration differs from the requested one");
  const std::size_t count_at = r.offset();
  const auto count = r.u64();
  std::size_t want = 0;
  for (auto s : l.sizes) want += s;
  if (count != want) throw DecodeError("parameter count does not match the configuration", count_at);
  if (r.remaining() != want * sizeof(float)) throw DecodeError("checkpoint payload has the wrong length", r.offset());
  p.tensors.resize(l.sizes.size());
  for (std::size_t i = 0; i < l.sizes.size(); ++i) {
    p.tensors[i].resize(l.sizes[i]);
    r.bytes(p.tensors[i].data(), l.sizes[i] * sizeof(float));
  }
  return p;
}

}  // namespace vrecon::field
