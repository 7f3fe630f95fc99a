#include "vrecon/sampling/samples.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "vrecon/core/binary_io.hpp"
#include "vrecon/core/parallel.hpp"
#include "vrecon/core/random.hpp"

namespace vrecon::sampling {

double tsdf_map(double sdf, double tau) { return std::clamp(0.5 - sdf / (2 * tau), 0.0, 1.0); }

std::vector<std::uint32_t> draw_indices(const std::vector<double>& weight, std::size_t count,
                                        std::uint64_t seed) {
  if (weight.empty()) throw Error(ErrorCode::EmptyInput, "no weights to draw from");
  std::vector<double> cdf(weight.size());
  std::partial_sum(weight.begin(), weight.end(), cdf.begin());
  const double total = cdf.back();
  if (!(total > 0)) throw Error(ErrorCode::ZeroWeights, "sampling weights sum to zero");
  Rng rng(seed);
  std::vector<std::uint32_t> out(count);
  for (auto& idx : out) {
    const double u = uniform01(rng) * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    idx = static_cast<std::uint32_t>(it - cdf.begin());
  }
  return out;
}

SampleSet draw_samples(const geometry::TriangleMesh& mesh, const SurfaceScan& scan,
                       const SampleWeights& weights, const SamplerConfig& cfg) {
  cfg.validate();
  if (weights.weight.size() != scan.size())
    throw Error(ErrorCode::Invalid, "weights do not belong to this scan");
  const auto n = static_cast<std::size_t>(cfg.n_samples);
  const auto n_uniform = static_cast<std::size_t>(std::llround(cfg.uniform_fraction * cfg.n_samples));
  const std::size_t n_surface = n - n_uniform;

  std::vector<Vec3> pos(n);
  const auto picks = draw_indices(weights.weight, n_surface, derive_seed(cfg.seed, 1));
  Rng rng(derive_seed(cfg.seed, 2));
  for (std::size_t i = 0; i < n_surface; ++i) {
    const Vec3 jitter{standard_normal(rng), standard_normal(rng), standard_normal(rng)};
    pos[i] = scan.points[picks[i]] + cfg.surface_sigma * jitter;
  }
  const Aabb box = mesh.bounds().inflated(3 * cfg.surface_sigma);
  const Vec3 e = box.extent();
  for (std::size_t i = n_surface; i < n; ++i) {
    const double a = uniform01(rng), b = uniform01(rng), c = uniform01(rng);
    pos[i] = box.lo + Vec3{a * e.x, b * e.y, c * e.z};
  }

  SampleSet set;
  set.records.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const Vec3 p{float(pos[i].x), float(pos[i].y), float(pos[i].z)};
    const auto nn = scan.tree->nearest(p);
    const double sdf = seen_from_outside(scan, p) ? nn.distance : -nn.distance;
    auto& r = set.records[i];
    r.position = {float(p.x), float(p.y), float(p.z)};
    r.sdf = static_cast<float>(sdf);
    r.value = static_cast<float>(tsdf_map(r.sdf, cfg.truncation));
    const Vec3& nrm = scan.normals[nn.index];
    r.normal = {float(nrm.x), float(nrm.y), float(nrm.z)};
    r.edge = scan.edge[nn.index];
    r.surface = i < n_surface;
  });
  return set;
}

namespace {
constexpr std::uint32_t kSampleVersion = 1;
}

std::vector<std::uint8_t> write_samples(const SampleSet& set) {
  ByteWriter w;
  w.tag("SDFS");
  w.u32(kSampleVersion);
  w.u32(static_cast<std::uint32_t>(set.records.size()));
  for (const auto& r : set.records) {
    for (float v : r.position) w.f32(v);
    w.f32(r.sdf);
    for (float v : r.normal) w.f32(v);
    w.f32(r.edge);
    w.f32(r.value);
    w.u8(r.surface ? 1 : 0);
  }
  return w.take();
}

SampleSet read_samples(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  r.expect_tag("SDFS");
  const std::size_t at = r.offset();
  const auto version = r.u32();
  if (version != kSampleVersion)
    throw DecodeError("unsupported sample file version " + std::to_string(version), at);
  const auto count = r.u32();
  if (r.remaining() / 37 < count) throw DecodeError("sample file shorter than its record count", r.offset());
  SampleSet set;
  set.records.resize(count);
  for (auto& s : set.records) {
    for (float& v : s.position) v = r.f32();
    s.sdf = r.f32();
    for (float& v : s.normal) v = r.f32();
    s.edge = r.f32();
    s.value = r.f32();
    const std::size_t flag_at = r.offset();
    const auto flag = r.u8();
    if (flag > 1) throw DecodeError("surface flag must be 0 or 1", flag_at);
    s.surface = flag == 1;
  }
  if (r.remaining() != 0) throw DecodeError("trailing bytes after sample records", r.offset());
  return set;
}

std::string weights_ply(const SurfaceScan& scan, const std::vector<double>& weight) {
  if (weight.size() != scan.size()) throw Error(ErrorCode::Invalid, "weights do not belong to this scan");
  const double top = weight.empty() ? 1.0 : *std::max_element(weight.begin(), weight.end());
  std::ostringstream os;
  os << "ply\nformat ascii 1.0\nelement vertex " << scan.size()
     << "\nproperty float x\nproperty float y\nproperty float z\n"
        "property uchar red\nproperty uchar green\nproperty uchar blue\nproperty float weight\n"
        "end_header\n";
  for (std::size_t i = 0; i < scan.size(); ++i) {
    // blue (low) to red (high), square-root stretched so small weights show
    const double t = top > 0 ? std::sqrt(weight[i] / top) : 0.0;
    const auto& p = scan.points[i];
    os << p.x << ' ' << p.y << ' ' << p.z << ' ' << int(255 * t) << ' ' << int(64 * (1 - t)) << ' '
       << int(255 * (1 - t)) << ' ' << weight[i] << '\n';
  }
  return os.str();
}

}  // namespace vrecon::sampling
