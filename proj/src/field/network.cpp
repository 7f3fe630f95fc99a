#include "vrecon/field/network.hpp"

#include <algorithm>
#include <cmath>

#include "vrecon/core/error.hpp"
#include "vrecon/simd/kernels.hpp"

namespace vrecon::field {

namespace {

template <class T>
T vdot(const T* a, const T* b, std::size_t n) {
  return simd::dot(std::span<const T>(a, n), std::span<const T>(b, n));
}

template <class T>
void vaxpy(T alpha, const T* x, T* y, std::size_t n) {
  simd::axpy(alpha, std::span<const T>(x, n), std::span<T>(y, n));
}

// Shifted copy of one input channel for kernel tap (ky, kx): row[y][x] =
// in[y*s + ky - 1][x*s + kx - 1], zero outside.
template <class T>
void gather_tap(const T* in, int h, int w, int s, int ky, int kx, int ho, int wo, T* row) {
  for (int y = 0; y < ho; ++y) {
    const int iy = y * s + ky - 1;
    T* dst = row + static_cast<std::size_t>(y) * wo;
    if (iy < 0 || iy >= h) {
      std::fill(dst, dst + wo, T(0));
      continue;
    }
    const T* src = in + static_cast<std::size_t>(iy) * w;
    for (int x = 0; x < wo; ++x) {
      const int ix = x * s + kx - 1;
      dst[x] = (ix >= 0 && ix < w) ? src[ix] : T(0);
    }
  }
}

template <class T>
void scatter_tap(T* in, int h, int w, int s, int ky, int kx, int ho, int wo, const T* row) {
  for (int y = 0; y < ho; ++y) {
    const int iy = y * s + ky - 1;
    if (iy < 0 || iy >= h) continue;
    T* dst = in + static_cast<std::size_t>(iy) * w;
    const T* src = row + static_cast<std::size_t>(y) * wo;
    for (int x = 0; x < wo; ++x) {
      const int ix = x * s + kx - 1;
      if (ix >= 0 && ix < w) dst[ix] += src[x];
    }
  }
}

}  // namespace

template <class T>
int Tape<T>::push(Tensor<T> t) {
  values_.push_back(std::move(t));
  grad_values_.emplace_back();
  return static_cast<int>(values_.size()) - 1;
}

template <class T>
Tensor<T>& Tape<T>::grad(int id) {
  auto& g = grad_values_[static_cast<std::size_t>(id)];
  if (g.data.empty()) {
    const auto& v = values_[static_cast<std::size_t>(id)];
    g = Tensor<T>(v.c, v.h, v.w);
  }
  return g;
}

template <class T>
int Tape<T>::input(Tensor<T> t) {
  return push(std::move(t));
}

template <class T>
int Tape<T>::conv(int x, int wi, const ConvSpec& spec) {
  const Tensor<T>& in = values_[static_cast<std::size_t>(x)];
  if (in.c != spec.cin) throw Error(ErrorCode::Dimension, "convolution input has the wrong channel count");
  const int s = spec.stride;
  const int ho = (in.h - 1) / s + 1, wo = (in.w - 1) / s + 1;
  Tensor<T> out(spec.cout, ho, wo);
  const std::vector<T>& wt = params_[static_cast<std::size_t>(wi)];
  const std::vector<T>& b = params_[static_cast<std::size_t>(wi) + 1];
  const std::size_t plane = out.plane();
  for (int co = 0; co < spec.cout; ++co) std::fill(out.channel(co), out.channel(co) + plane, b[co]);
  std::vector<T> row(plane);
  const int taps = spec.cin * 9;
  for (int ci = 0; ci < spec.cin; ++ci)
    for (int k = 0; k < 9; ++k) {
      gather_tap(in.channel(ci), in.h, in.w, s, k / 3, k % 3, ho, wo, row.data());
      for (int co = 0; co < spec.cout; ++co)
        vaxpy(wt[static_cast<std::size_t>(co) * taps + ci * 9 + k], row.data(), out.channel(co), plane);
    }
  const int id = push(std::move(out));
  if (grads_) {
    backward_.push_back([this, x, id, wi, spec, ho, wo, taps] {
      const Tensor<T>& in = values_[static_cast<std::size_t>(x)];
      const Tensor<T>& go = grad(id);
      Tensor<T>& gi = grad(x);
      const std::vector<T>& wt = params_[static_cast<std::size_t>(wi)];
      std::vector<T>& gw = (*grads_)[static_cast<std::size_t>(wi)];
      std::vector<T>& gb = (*grads_)[static_cast<std::size_t>(wi) + 1];
      const std::size_t plane = go.plane();
      for (int co = 0; co < spec.cout; ++co) {
        T sum = 0;
        for (std::size_t i = 0; i < plane; ++i) sum += go.channel(co)[i];
        gb[co] += sum;
      }
      std::vector<T> row(plane), drow(plane);
      for (int ci = 0; ci < spec.cin; ++ci)
        for (int k = 0; k < 9; ++k) {
          gather_tap(in.channel(ci), in.h, in.w, spec.stride, k / 3, k % 3, ho, wo, row.data());
          std::fill(drow.begin(), drow.end(), T(0));
          for (int co = 0; co < spec.cout; ++co) {
            const std::size_t wk = static_cast<std::size_t>(co) * taps + ci * 9 + k;
            gw[wk] += vdot(go.channel(co), row.data(), plane);
            vaxpy(wt[wk], go.channel(co), drow.data(), plane);
          }
          scatter_tap(gi.channel(ci), in.h, in.w, spec.stride, k / 3, k % 3, ho, wo, drow.data());
        }
    });
  }
  return id;
}

template <class T>
int Tape<T>::tanh(int x) {
  Tensor<T> out = values_[static_cast<std::size_t>(x)];
  for (auto& v : out.data) v = std::tanh(v);
  const int id = push(std::move(out));
  if (grads_)
    backward_.push_back([this, x, id] {
      const auto& y = values_[static_cast<std::size_t>(id)].data;
      const auto& gy = grad(id).data;
      auto& gx = grad(x).data;
      for (std::size_t i = 0; i < y.size(); ++i) gx[i] += gy[i] * (T(1) - y[i] * y[i]);
    });
  return id;
}

template <class T>
int Tape<T>::add(int a, int b) {
  Tensor<T> out = values_[static_cast<std::size_t>(a)];
  const auto& vb = values_[static_cast<std::size_t>(b)].data;
  if (vb.size() != out.data.size()) throw Error(ErrorCode::Dimension, "added tensors differ in shape");
  for (std::size_t i = 0; i < vb.size(); ++i) out.data[i] += vb[i];
  const int id = push(std::move(out));
  if (grads_)
    backward_.push_back([this, a, b, id] {
      const auto& g = grad(id).data;
      auto& ga = grad(a).data;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      auto& gb = grad(b).data;
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
    });
  return id;
}

template <class T>
int Tape<T>::pool(int x) {
  const Tensor<T>& in = values_[static_cast<std::size_t>(x)];
  Tensor<T> out(in.c, (in.h + 1) / 2, (in.w + 1) / 2);
  for (int k = 0; k < in.c; ++k)
    for (int y = 0; y < out.h; ++y)
      for (int xx = 0; xx < out.w; ++xx) {
        T sum = 0;
        int n = 0;
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx) {
            const int iy = 2 * y + dy, ix = 2 * xx + dx;
            if (iy < in.h && ix < in.w) { sum += in.at(k, iy, ix); ++n; }
          }
        out.at(k, y, xx) = sum / T(n);
      }
  const int id = push(std::move(out));
  if (grads_)
    backward_.push_back([this, x, id] {
      const Tensor<T>& g = grad(id);
      Tensor<T>& gi = grad(x);
      for (int k = 0; k < gi.c; ++k)
        for (int y = 0; y < g.h; ++y)
          for (int xx = 0; xx < g.w; ++xx) {
            const int ny = std::min(2, gi.h - 2 * y), nx = std::min(2, gi.w - 2 * xx);
            const T share = g.at(k, y, xx) / T(ny * nx);
            for (int dy = 0; dy < ny; ++dy)
              for (int dx = 0; dx < nx; ++dx) gi.at(k, 2 * y + dy, 2 * xx + dx) += share;
          }
    });
  return id;
}

template <class T>
int Tape<T>::upsample(int x, int h, int w) {
  const Tensor<T>& in = values_[static_cast<std::size_t>(x)];
  if ((h + 1) / 2 != in.h || (w + 1) / 2 != in.w) throw Error(ErrorCode::Dimension, "upsample target does not match");
  Tensor<T> out(in.c, h, w);
  for (int k = 0; k < in.c; ++k)
    for (int y = 0; y < h; ++y)
      for (int xx = 0; xx < w; ++xx) out.at(k, y, xx) = in.at(k, y / 2, xx / 2);
  const int id = push(std::move(out));
  if (grads_)
    backward_.push_back([this, x, id] {
      const Tensor<T>& g = grad(id);
      Tensor<T>& gi = grad(x);
      for (int k = 0; k < g.c; ++k)
        for (int y = 0; y < g.h; ++y)
          for (int xx = 0; xx < g.w; ++xx) gi.at(k, y / 2, xx / 2) += g.at(k, y, xx);
    });
  return id;
}

template <class T>
void Tape<T>::backward() {
  if (!grads_) throw Error(ErrorCode::Invalid, "tape was built without gradients");
  for (auto it = backward_.rbegin(); it != backward_.rend(); ++it) (*it)();
}

template <class T>
Tensor<T> encoder_input(const img::GrayImage& image) {
  Tensor<T> t(1, image.height, image.width);
  for (std::size_t i = 0; i < image.data.size(); ++i) t.data[i] = T(1) - T(image.data[i]);
  return t;
}

namespace {

template <class T>
int residual(Tape<T>& tape, const Layout& l, int view, int conv, int x) {
  const int y = tape.conv(x, l.conv_weight(view, conv), l.convs[static_cast<std::size_t>(conv)]);
  return tape.add(x, tape.tanh(y));
}

template <class T>
int hourglass(Tape<T>& tape, const Layout& l, const EncoderConfig& enc, int view, int stack, int level, int x) {
  const int up = residual(tape, l, view, block_conv(enc, stack, level, 0), x);
  const int low = tape.pool(x);
  const int low1 = residual(tape, l, view, block_conv(enc, stack, level, 1), low);
  const int low2 = level > 1 ? hourglass(tape, l, enc, view, stack, level - 1, low1)
                             : residual(tape, l, view, bottom_conv(enc, stack), low1);
  const int low3 = residual(tape, l, view, block_conv(enc, stack, level, 2), low2);
  const auto& shape = tape.value(x);
  return tape.add(up, tape.upsample(low3, shape.h, shape.w));
}

}  // namespace

template <class T>
int encode(Tape<T>& tape, const Layout& l, const EncoderConfig& enc, int view, int input) {
  const auto& in = tape.value(input);
  const int min_dim = enc.min_input_dim();
  if (in.h < min_dim || in.w < min_dim)
    throw Error(ErrorCode::Dimension, "view image is " + std::to_string(in.w) + "x" + std::to_string(in.h) +
                                          "; the encoder needs at least " + std::to_string(min_dim) + " pixels per side");
  int x = input;
  for (int i = 0; i < enc.initial_downsample_steps; ++i) {
    const int c = initial_conv(enc, i);
    x = tape.tanh(tape.conv(x, l.conv_weight(view, c), l.convs[static_cast<std::size_t>(c)]));
  }
  for (int s = 0; s < enc.stacks; ++s) x = hourglass(tape, l, enc, view, s, enc.internal_downsample_steps, x);
  return x;
}

template <class T>
void sample_features(const Tensor<T>& f, double fu, double fv, T* out) {
  fu = std::clamp(fu, 0.0, double(f.w - 1));
  fv = std::clamp(fv, 0.0, double(f.h - 1));
  const int x0 = std::min(static_cast<int>(fu), f.w - 1), y0 = std::min(static_cast<int>(fv), f.h - 1);
  const int x1 = std::min(x0 + 1, f.w - 1), y1 = std::min(y0 + 1, f.h - 1);
  const T ax = T(fu - x0), ay = T(fv - y0);
  const T w00 = (1 - ax) * (1 - ay), w10 = ax * (1 - ay), w01 = (1 - ax) * ay, w11 = ax * ay;
  for (int k = 0; k < f.c; ++k)
    out[k] = w00 * f.at(k, y0, x0) + w10 * f.at(k, y0, x1) + w01 * f.at(k, y1, x0) + w11 * f.at(k, y1, x1);
}

template <class T>
void scatter_features(Tensor<T>& df, double fu, double fv, const T* g) {
  fu = std::clamp(fu, 0.0, double(df.w - 1));
  fv = std::clamp(fv, 0.0, double(df.h - 1));
  const int x0 = std::min(static_cast<int>(fu), df.w - 1), y0 = std::min(static_cast<int>(fv), df.h - 1);
  const int x1 = std::min(x0 + 1, df.w - 1), y1 = std::min(y0 + 1, df.h - 1);
  const T ax = T(fu - x0), ay = T(fv - y0);
  const T w00 = (1 - ax) * (1 - ay), w10 = ax * (1 - ay), w01 = (1 - ax) * ay, w11 = ax * ay;
  for (int k = 0; k < df.c; ++k) {
    df.at(k, y0, x0) += w00 * g[k];
    df.at(k, y0, x1) += w10 * g[k];
    df.at(k, y1, x0) += w01 * g[k];
    df.at(k, y1, x1) += w11 * g[k];
  }
}

template <class T>
void mlp_forward(const Params<T>& p, const Layout& l, const std::vector<T>& input, int batch,
                 std::vector<std::vector<T>>& acts) {
  const int layers = static_cast<int>(l.mlp_sizes.size()) - 1;
  acts.assign(static_cast<std::size_t>(layers) + 1, {});
  acts[0] = input;
  for (int k = 0; k < layers; ++k) {
    const int nin = l.mlp_sizes[k], nout = l.mlp_sizes[k + 1];
    const auto& w = p[static_cast<std::size_t>(l.mlp_weight(k))];
    const auto& b = p[static_cast<std::size_t>(l.mlp_weight(k)) + 1];
    auto& out = acts[static_cast<std::size_t>(k) + 1];
    out.resize(static_cast<std::size_t>(batch) * nout);
    const bool hidden = k + 1 < layers;
    for (int r = 0; r < batch; ++r) {
      const T* x = acts[static_cast<std::size_t>(k)].data() + static_cast<std::size_t>(r) * nin;
      for (int j = 0; j < nout; ++j) {
        const T z = b[j] + vdot(w.data() + static_cast<std::size_t>(j) * nin, x, static_cast<std::size_t>(nin));
        out[static_cast<std::size_t>(r) * nout + j] = hidden ? std::tanh(z) : z;
      }
    }
  }
}

template <class T>
void mlp_backward(const Params<T>& p, const Layout& l, const std::vector<std::vector<T>>& acts, int batch,
                  std::vector<T> d_out, Params<T>& grads, std::vector<T>* d_input) {
  const int layers = static_cast<int>(l.mlp_sizes.size()) - 1;
  for (int k = layers - 1; k >= 0; --k) {
    const int nin = l.mlp_sizes[k], nout = l.mlp_sizes[k + 1];
    const auto wi = static_cast<std::size_t>(l.mlp_weight(k));
    const auto& w = p[wi];
    auto& gw = grads[wi];
    auto& gb = grads[wi + 1];
    if (k + 1 < layers) {
      const auto& y = acts[static_cast<std::size_t>(k) + 1];
      for (std::size_t i = 0; i < d_out.size(); ++i) d_out[i] *= T(1) - y[i] * y[i];
    }
    const auto& x = acts[static_cast<std::size_t>(k)];
    const bool need_dx = k > 0 || d_input;
    std::vector<T> d_x(need_dx ? static_cast<std::size_t>(batch) * nin : 0, T(0));
    for (int r = 0; r < batch; ++r) {
      const T* xr = x.data() + static_cast<std::size_t>(r) * nin;
      T* dxr = need_dx ? d_x.data() + static_cast<std::size_t>(r) * nin : nullptr;
      for (int j = 0; j < nout; ++j) {
        const T g = d_out[static_cast<std::size_t>(r) * nout + j];
        if (g == T(0)) continue;
        gb[j] += g;
        vaxpy(g, xr, gw.data() + static_cast<std::size_t>(j) * nin, static_cast<std::size_t>(nin));
        if (dxr) vaxpy(g, w.data() + static_cast<std::size_t>(j) * nin, dxr, static_cast<std::size_t>(nin));
      }
    }
    if (k == 0) {
      if (d_input) *d_input = std::move(d_x);
    } else {
      d_out = std::move(d_x);
    }
  }
}

namespace {
template <class T>
T sigmoid(T x) {
  return x >= 0 ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
}
constexpr double kNormalEps = 1e-12;
}  // namespace

template <class T>
Prediction<T> apply_heads(const T* raw) {
  Prediction<T> p;
  p.value = sigmoid(raw[0]);
  const T len = std::sqrt(raw[1] * raw[1] + raw[2] * raw[2] + raw[3] * raw[3] + T(kNormalEps));
  for (int k = 0; k < 3; ++k) p.normal[k] = raw[1 + k] / len;
  p.edge = sigmoid(raw[4]);
  return p;
}

template <class T>
LossTerms<T> sample_loss(const T* raw, const Target& t, const LossWeights& w, T* d_raw) {
  const Prediction<T> p = apply_heads(raw);
  LossTerms<T> out;
  const T dv = p.value - T(t.value);
  out.value = T(w.value) * dv * dv;
  if (d_raw) {
    for (int k = 0; k < 5; ++k) d_raw[k] = 0;
    d_raw[0] = T(2 * w.value) * dv * p.value * (1 - p.value);
  }
  if (!t.surface) return out;
  T cosine = 0;
  for (int k = 0; k < 3; ++k) cosine += p.normal[k] * T(t.normal[k]);
  out.normal = T(w.normal) * (1 - cosine);
  const T de = p.edge - T(t.edge);
  out.edge = T(w.edge) * de * de;
  if (d_raw) {
    const T len = std::sqrt(raw[1] * raw[1] + raw[2] * raw[2] + raw[3] * raw[3] + T(kNormalEps));
    for (int k = 0; k < 3; ++k) d_raw[1 + k] = -T(w.normal) * (T(t.normal[k]) - p.normal[k] * cosine) / len;
    d_raw[4] = T(2 * w.edge) * de * p.edge * (1 - p.edge);
  }
  return out;
}

#define VRECON_INSTANTIATE(T)                                                                          \
  template class Tape<T>;                                                                              \
  template Tensor<T> encoder_input<T>(const img::GrayImage&);                                          \
  template int encode<T>(Tape<T>&, const Layout&, const EncoderConfig&, int, int);                     \
  template void sample_features<T>(const Tensor<T>&, double, double, T*);                              \
  template void scatter_features<T>(Tensor<T>&, double, double, const T*);                             \
  template void mlp_forward<T>(const Params<T>&, const Layout&, const std::vector<T>&, int,            \
                               std::vector<std::vector<T>>&);                                          \
  template void mlp_backward<T>(const Params<T>&, const Layout&, const std::vector<std::vector<T>>&,   \
                                int, std::vector<T>, Params<T>&, std::vector<T>*);                     \
  template Prediction<T> apply_heads<T>(const T*);                                                     \
  template LossTerms<T> sample_loss<T>(const T*, const Target&, const LossWeights&, T*);

VRECON_INSTANTIATE(float)
VRECON_INSTANTIATE(double)

}  // namespace vrecon::field
