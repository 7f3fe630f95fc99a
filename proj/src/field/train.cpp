#include "vrecon/field/train.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vrecon/core/binary_io.hpp"
#include "vrecon/core/random.hpp"

namespace vrecon::field {

Target target_of(const sampling::SampleRecord& r) {
  Target t;
  t.value = r.value;
  t.normal = {r.normal[0], r.normal[1], r.normal[2]};
  t.edge = r.edge;
  t.surface = r.surface;
  return t;
}

template <class T>
LossTerms<T> batch_loss(const Params<T>& params, const FieldConfig& cfg, const ViewInputs& inputs,
                        const std::vector<sampling::SampleRecord>& batch, const LossWeights& w, Params<T>* grads) {
  const Layout l = make_layout(cfg);
  const auto& enc = cfg.encoder;
  const int c = enc.feature_depth;
  const int s = enc.downsample_factor();
  const int din = l.mlp_input();
  const int n = static_cast<int>(batch.size());
  if (n == 0) throw Error(ErrorCode::EmptyInput, "empty sample batch");

  Tape<T> tape(params, grads);
  std::array<int, 4> feat{};
  std::array<geometry::OrthoView, 4> cams;
  for (int v = 0; v < 4; ++v) {
    const int in = tape.input(encoder_input<T>(inputs.images[static_cast<std::size_t>(v)]));
    feat[static_cast<std::size_t>(v)] = encode(tape, l, enc, v, in);
    cams[static_cast<std::size_t>(v)] = inputs.camera(v);
  }
  std::vector<std::array<double, 8>> coords(static_cast<std::size_t>(n));
  std::vector<T> x(static_cast<std::size_t>(n) * din);
  for (int r = 0; r < n; ++r) {
    const auto& rec = batch[static_cast<std::size_t>(r)];
    const Vec3 p{rec.position[0], rec.position[1], rec.position[2]};
    T* row = x.data() + static_cast<std::size_t>(r) * din;
    for (int v = 0; v < 4; ++v) {
      const auto q = cams[static_cast<std::size_t>(v)].project(p);
      const double fu = feature_coord(q.u, s), fv = feature_coord(q.v, s);
      coords[static_cast<std::size_t>(r)][static_cast<std::size_t>(2 * v)] = fu;
      coords[static_cast<std::size_t>(r)][static_cast<std::size_t>(2 * v + 1)] = fv;
      sample_features(tape.value(feat[static_cast<std::size_t>(v)]), fu, fv, row + static_cast<std::size_t>(v) * c);
    }
    row[4 * c] = T(p.x);
    row[4 * c + 1] = T(p.y);
    row[4 * c + 2] = T(p.z);
  }
  std::vector<std::vector<T>> acts;
  mlp_forward(params, l, x, n, acts);
  LossTerms<T> total;
  std::vector<T> d_raw(grads ? static_cast<std::size_t>(n) * 5 : 0);
  const T scale = T(1) / T(n);
  for (int r = 0; r < n; ++r) {
    T* dr = grads ? d_raw.data() + static_cast<std::size_t>(r) * 5 : nullptr;
    const auto t = sample_loss(acts.back().data() + static_cast<std::size_t>(r) * 5,
                               target_of(batch[static_cast<std::size_t>(r)]), w, dr);
    total.value += t.value * scale;
    total.normal += t.normal * scale;
    total.edge += t.edge * scale;
    if (dr)
      for (int k = 0; k < 5; ++k) dr[k] *= scale;
  }
  if (!grads) return total;
  std::vector<T> dx;
  mlp_backward(params, l, acts, n, std::move(d_raw), *grads, &dx);
  for (int r = 0; r < n; ++r)
    for (int v = 0; v < 4; ++v)
      scatter_features(tape.grad(feat[static_cast<std::size_t>(v)]), coords[static_cast<std::size_t>(r)][static_cast<std::size_t>(2 * v)],
                       coords[static_cast<std::size_t>(r)][static_cast<std::size_t>(2 * v + 1)],
                       dx.data() + static_cast<std::size_t>(r) * din + static_cast<std::size_t>(v) * c);
  tape.backward();
  return total;
}

template LossTerms<float> batch_loss<float>(const Params<float>&, const FieldConfig&, const ViewInputs&,
                                            const std::vector<sampling::SampleRecord>&, const LossWeights&, Params<float>*);
template LossTerms<double> batch_loss<double>(const Params<double>&, const FieldConfig&, const ViewInputs&,
                                              const std::vector<sampling::SampleRecord>&, const LossWeights&, Params<double>*);

std::vector<LossRow> train(TrainState& state, const std::vector<TrainExample>& data, const TrainConfig& cfg,
                           const views::AugmentConfig* augment, const std::function<void(const LossRow&)>& on_step) {
  cfg.validate();
  if (data.empty()) throw Error(ErrorCode::EmptyInput, "training needs at least one blueprint");
  for (const auto& ex : data)
    if (ex.samples.records.empty()) throw Error(ErrorCode::EmptyInput, "a training blueprint has no samples");
  const FieldConfig& fc = state.params.config;
  const LossWeights lw{cfg.lambda_value, cfg.lambda_normal, cfg.lambda_edge};
  std::vector<ViewInputs> fixed;
  if (!augment)
    for (const auto& ex : data) fixed.push_back(prepare_inputs(ex.views, fc.encoder));

  auto& p = state.params.tensors;
  if (state.m.size() != p.size()) {
    state.m.assign(p.size(), {});
    state.v.assign(p.size(), {});
    for (std::size_t i = 0; i < p.size(); ++i) {
      state.m[i].assign(p[i].size(), 0.0f);
      if (cfg.optimizer == Optimizer::Adam) state.v[i].assign(p[i].size(), 0.0f);
    }
  }
  if (cfg.optimizer == Optimizer::Adam)
    for (std::size_t i = 0; i < p.size(); ++i)
      if (state.v[i].size() != p[i].size()) state.v[i].assign(p[i].size(), 0.0f);

  std::vector<LossRow> rows;
  const std::size_t k = static_cast<std::size_t>(cfg.samples_per_step);
  for (int it = 0; it < cfg.iterations; ++it) {
    const std::int64_t step = state.step;
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(step)));
    const std::size_t pick = data.size() == 1 ? 0 : static_cast<std::size_t>(uniform01(rng) * data.size());
    const auto& ex = data[pick];
    ViewInputs aug_inputs;
    if (augment) {
      views::AugmentConfig a = *augment;
      a.seed = derive_seed(augment->seed, static_cast<std::uint64_t>(step));
      aug_inputs = prepare_inputs(views::augment(ex.views, a), fc.encoder);
    }
    const ViewInputs& inputs = augment ? aug_inputs : fixed[pick];
    // minibatch without replacement (partial Fisher-Yates)
    const auto& recs = ex.samples.records;
    std::vector<sampling::SampleRecord> batch;
    if (recs.size() <= k) {
      batch = recs;
    } else {
      std::vector<std::uint32_t> idx(recs.size());
      for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(uniform01(rng) * (idx.size() - i));
        std::swap(idx[i], idx[j]);
        batch.push_back(recs[idx[i]]);
      }
    }
    Params<float> g = zeros_like(p);
    const auto loss = batch_loss<float>(p, fc, inputs, batch, lw, &g);

    const float lr = static_cast<float>(cfg.learning_rate);
    if (cfg.optimizer == Optimizer::Sgd) {
      const float mu = static_cast<float>(cfg.momentum);
      for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p[i].size(); ++j) {
          state.m[i][j] = mu * state.m[i][j] + g[i][j];
          p[i][j] -= lr * state.m[i][j];
        }
    } else {
      const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
      const double t = static_cast<double>(step + 1);
      const float c1 = static_cast<float>(1 - std::pow(b1, t)), c2 = static_cast<float>(1 - std::pow(b2, t));
      const float eps = static_cast<float>(cfg.adam_epsilon);
      for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p[i].size(); ++j) {
          auto& m = state.m[i][j];
          auto& v = state.v[i][j];
          m = static_cast<float>(b1) * m + static_cast<float>(1 - b1) * g[i][j];
          v = static_cast<float>(b2) * v + static_cast<float>(1 - b2) * g[i][j] * g[i][j];
          p[i][j] -= lr * (m / c1) / (std::sqrt(v / c2) + eps);
        }
    }
    LossRow row{step, loss.total(), loss.value, loss.normal, loss.edge};
    rows.push_back(row);
    if (on_step) on_step(row);
    ++state.step;
  }
  return rows;
}

std::string loss_csv(const std::vector<LossRow>& rows, bool header) {
  std::ostringstream os;
  os.precision(9);
  if (header) os << "step,total,value,normal,edge\n";
  for (const auto& r : rows) os << r.step << ',' << r.total << ',' << r.value << ',' << r.normal << ',' << r.edge << '\n';
  return os.str();
}

namespace {
constexpr std::uint32_t kStateVersion = 1;

void write_moments(ByteWriter& w, const Params<float>& m) {
  w.u32(static_cast<std::uint32_t>(m.size()));
  for (const auto& t : m) {
    w.u64(t.size());
    w.bytes(t.data(), t.size() * sizeof(float));
  }
}

Params<float> read_moments(ByteReader& r) {
  const auto n = r.u32();
  if (n > 1u << 20) throw DecodeError("implausible tensor count", r.offset());
  Params<float> m(n);
  for (auto& t : m) {
    const auto len = r.u64();
    if (len > r.remaining() / sizeof(float)) throw DecodeError("moment tensor overruns the file", r.offset());
    t.resize(len);
    r.bytes(t.data(), len * sizeof(float));
  }
  return m;
}
}  // namespace

std::vector<std::uint8_t> save_state(const TrainState& s) {
  ByteWriter w;
  w.tag("PAFO");
  w.u32(kStateVersion);
  w.u64(static_cast<std::uint64_t>(s.step));
  const auto ckpt = save_weights(s.params);
  w.u64(ckpt.size());
  w.bytes(ckpt.data(), ckpt.size());
  write_moments(w, s.m);
  write_moments(w, s.v);
  return w.take();
}

TrainState load_state(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  r.expect_tag("PAFO");
  const std::size_t at = r.offset();
  if (r.u32() != kStateVersion) throw DecodeError("unsupported training state version", at);
  TrainState s;
  s.step = static_cast<std::int64_t>(r.u64());
  const auto len = r.u64();
  if (len > r.remaining()) throw DecodeError("embedded checkpoint overruns the file", r.offset());
  std::vector<std::uint8_t> ckpt(len);
  r.bytes(ckpt.data(), len);
  s.params = load_weights(ckpt);
  s.m = read_moments(r);
  s.v = read_moments(r);
  return s;
}

GradCheckResult grad_check(const ParamSet& params, const ViewInputs& inputs,
                           const std::vector<sampling::SampleRecord>& batch, const LossWeights& w, double eps,
                           bool mlp_only) {
  const Layout l = make_layout(params.config);
  Params<double> p = convert_params<double>(params);
  Params<double> g = zeros_like(p);
  batch_loss<double>(p, params.config, inputs, batch, w, &g);
  GradCheckResult res;
  const std::size_t first = mlp_only ? static_cast<std::size_t>(l.mlp_base) : 0;
  for (std::size_t i = first; i < p.size(); ++i)
    for (std::size_t j = 0; j < p[i].size(); ++j) {
      const double keep = p[i][j];
      p[i][j] = keep + eps;
      const double up = batch_loss<double>(p, params.config, inputs, batch, w, nullptr).total();
      p[i][j] = keep - eps;
      const double down = batch_loss<double>(p, params.config, inputs, batch, w, nullptr).total();
      p[i][j] = keep;
      const double numeric = (up - down) / (2 * eps);
      const double analytic = g[i][j];
      ++res.checked;
      if (numeric == 0 && analytic == 0) continue;
      const double rel = std::abs(numeric - analytic) / std::max(std::abs(numeric), std::abs(analytic));
      res.max_relative_error = std::max(res.max_relative_error, rel);
    }
  return res;
}

}  // namespace vrecon::field
