#pragma once

#include <array>
#include <functional>
#include <vector>

#include "vrecon/field/params.hpp"
#include "vrecon/img/image.hpp"

namespace vrecon::field {

template <class T>
struct Tensor {
  int c = 0, h = 0, w = 0;
  std::vector<T> data;

  Tensor() = default;
  Tensor(int c_, int h_, int w_) : c(c_), h(h_), w(w_), data(static_cast<std::size_t>(c_) * h_ * w_, T(0)) {}
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  T* channel(int k) { return data.data() + k * plane(); }
  const T* channel(int k) const { return data.data() + k * plane(); }
  T& at(int k, int y, int x) { return data[k * plane() + static_cast<std::size_t>(y) * w + x]; }
  T at(int k, int y, int x) const { return data[k * plane() + static_cast<std::size_t>(y) * w + x]; }
};

template <class T>
using Params = std::vector<std::vector<T>>;

template <class T>
Params<T> convert_params(const ParamSet& p) {
  Params<T> out(p.tensors.size());
  for (std::size_t i = 0; i < p.tensors.size(); ++i) out[i].assign(p.tensors[i].begin(), p.tensors[i].end());
  return out;
}

template <class T>
Params<T> zeros_like(const Params<T>& p) {
  Params<T> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i].assign(p[i].size(), T(0));
  return out;
}

// Reverse-mode record of the encoder graph. With `grads` null nothing is
// recorded and backward() is unavailable.
template <class T>
class Tape {
 public:
  Tape(const Params<T>& params, Params<T>* grads) : params_(params), grads_(grads) {}

  int input(Tensor<T> t);
  int conv(int x, int weight_index, const ConvSpec& spec);
  int tanh(int x);
  int add(int a, int b);
  int pool(int x);                      // 2x2 mean, partial windows at odd edges
  int upsample(int x, int h, int w);    // nearest, cropped to h x w

  const Tensor<T>& value(int id) const { return values_[static_cast<std::size_t>(id)]; }
  Tensor<T>& grad(int id);
  // Propagates whatever has been written into grad(output) back to the parameters.
  void backward();

 private:
  int push(Tensor<T> t);
  const Params<T>& params_;
  Params<T>* grads_;
  std::vector<Tensor<T>> values_;
  std::vector<Tensor<T>> grad_values_;
  std::vector<std::function<void()>> backward_;
};

// Ink becomes 1, paper 0.
template <class T>
Tensor<T> encoder_input(const img::GrayImage& image);

// Hourglass encoder for one view; returns the tape id of the feature map.
template <class T>
int encode(Tape<T>& tape, const Layout& layout, const EncoderConfig& enc, int view, int input);

// Feature-map position of an input-image pixel coordinate.
inline double feature_coord(double pixel, int factor) { return pixel / factor; }

template <class T>
void sample_features(const Tensor<T>& f, double fu, double fv, T* out);
template <class T>
void scatter_features(Tensor<T>& df, double fu, double fv, const T* g);

// Dense head over a batch of B rows. acts[0] is the input, acts[k] the
// output of layer k (tanh for hidden layers, raw for the last).
template <class T>
void mlp_forward(const Params<T>& p, const Layout& l, const std::vector<T>& input, int batch,
                 std::vector<std::vector<T>>& acts);
template <class T>
void mlp_backward(const Params<T>& p, const Layout& l, const std::vector<std::vector<T>>& acts, int batch,
                  std::vector<T> d_out, Params<T>& grads, std::vector<T>* d_input);

template <class T>
struct Prediction {
  T value = 0;
  std::array<T, 3> normal{};
  T edge = 0;
};

template <class T>
Prediction<T> apply_heads(const T* raw);

struct LossWeights {
  double value = 1.0, normal = 0.1, edge = 0.1;
};

template <class T>
struct LossTerms {
  T value = 0, normal = 0, edge = 0;
  T total() const { return value + normal + edge; }
};

struct Target {
  double value = 0.5;
  std::array<double, 3> normal{0, 0, 1};
  double edge = 0;
  bool surface = false;
};

// Per-sample loss; writes d(loss)/d(raw) into d_raw when given. Normal and
// edge terms only count for surface-derived samples.
template <class T>
LossTerms<T> sample_loss(const T* raw, const Target& target, const LossWeights& w, T* d_raw);

}  // namespace vrecon::field
