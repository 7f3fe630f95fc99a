#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vrecon/field/field.hpp"
#include "vrecon/sampling/samples.hpp"
#include "vrecon/views/augment.hpp"

namespace vrecon::field {

struct TrainExample {
  views::ViewSet views;  // finalized
  sampling::SampleSet samples;
};

struct LossRow {
  std::int64_t step = 0;
  double total = 0, value = 0, normal = 0, edge = 0;
};

// Everything needed to continue a run where it stopped.
struct TrainState {
  ParamSet params;
  std::int64_t step = 0;
  Params<float> m, v;  // optimizer moments; empty until the first step
};

// "PAFO", u32 version, u64 step, then the checkpoint bytes and both moment sets.
std::vector<std::uint8_t> save_state(const TrainState& s);
TrainState load_state(const std::vector<std::uint8_t>& bytes);

Target target_of(const sampling::SampleRecord& r);

// Mean loss over `batch` for one blueprint; fills `grads` (same layout as
// params, accumulated) when given.
template <class T>
LossTerms<T> batch_loss(const Params<T>& params, const FieldConfig& cfg, const ViewInputs& inputs,
                        const std::vector<sampling::SampleRecord>& batch, const LossWeights& w, Params<T>* grads);

// Runs cfg.iterations more steps. Each step picks one blueprint, optionally
// augments its views with a per-step seed, and takes a minibatch of its
// samples. Deterministic in cfg.seed and the starting state.
std::vector<LossRow> train(TrainState& state, const std::vector<TrainExample>& data, const TrainConfig& cfg,
                           const views::AugmentConfig* augment = nullptr,
                           const std::function<void(const LossRow&)>& on_step = {});

std::string loss_csv(const std::vector<LossRow>& rows, bool header = true);

struct GradCheckResult {
  double max_relative_error = 0;
  std::size_t checked = 0;
};

// Central differences in double precision against the analytic gradient,
// over every parameter (or only the MLP's). Entries where both gradients
// are exactly zero count as exact.
GradCheckResult grad_check(const ParamSet& params, const ViewInputs& inputs,
                           const std::vector<sampling::SampleRecord>& batch, const LossWeights& w,
                           double eps = 1e-4, bool mlp_only = false);

}  // namespace vrecon::field
