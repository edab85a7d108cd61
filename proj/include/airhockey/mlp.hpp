#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "airhockey/kernels.hpp"

namespace airhockey::nn {

// Fully connected ReLU network; the last layer is linear.
struct MlpSpec {
  std::vector<int> layer_sizes{8, 100, 100, 40, 25};

  std::size_t inputs() const { return static_cast<std::size_t>(layer_sizes.front()); }
  std::size_t outputs() const { return static_cast<std::size_t>(layer_sizes.back()); }
  std::size_t layer_count() const { return layer_sizes.size() - 1; }

  void validate() const;
  bool operator==(const MlpSpec&) const = default;
};

template <typename Real>
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<Real> weights;  // in x out
  std::vector<Real> bias;     // out

  bool operator==(const DenseLayer&) const = default;
};

// Weights, gradients and optimizer state share this shape.
template <typename Real>
using ParameterSet = std::vector<DenseLayer<Real>>;

template <typename Real>
ParameterSet<Real> zeros_like(const MlpSpec& spec);

struct RmsPropParams {
  double learning_rate = 0.00025;
  double decay = 0.95;
  double epsilon = 0.01;

  bool operator==(const RmsPropParams&) const = default;
};

// Mini-batch for the masked squared Bellman loss: only the output of the
// action taken in each row carries error.
template <typename Real>
struct TrainingBatch {
  std::size_t rows = 0;
  std::vector<Real> states;  // rows x inputs
  std::vector<int> actions;
  std::vector<Real> targets;
};

// Activation buffers reused across calls by one owner.
template <typename Real>
struct Workspace {
  std::vector<std::vector<Real>> activations;  // [0] input, [L] output
  std::vector<std::vector<Real>> deltas;
};

template <typename Real>
class Mlp {
 public:
  Mlp() = default;
  // All parameters zero.
  explicit Mlp(MlpSpec spec);

  // He-uniform weights (bound sqrt(6/fan_in)), zero biases.
  static Mlp initialized(MlpSpec spec, std::uint64_t seed);

  const MlpSpec& spec() const { return spec_; }
  const ParameterSet<Real>& params() const { return params_; }
  ParameterSet<Real>& params() { return params_; }
  const ParameterSet<Real>& rmsprop_cache() const { return cache_; }
  ParameterSet<Real>& rmsprop_cache() { return cache_; }

  kernels::Exec exec() const { return exec_; }
  void set_exec(kernels::Exec exec) { exec_ = exec; }

  // Q-values for one feature vector.
  std::vector<Real> forward(std::span<const Real> features) const;

  // Q-values for `rows` stacked feature vectors, written to `out`.
  void forward_batch(std::span<const Real> states, std::size_t rows, Workspace<Real>& ws,
                     std::vector<Real>& out) const;

  // Mean over the batch of (target - Q(s, a))^2.
  Real loss(const TrainingBatch<Real>& batch) const;

  // Gradient of loss() with the targets held constant; returns the loss.
  Real backward(const TrainingBatch<Real>& batch, Workspace<Real>& ws,
                ParameterSet<Real>& grad) const;

  void rmsprop_step(const ParameterSet<Real>& grad, const RmsPropParams& opt);

  std::size_t parameter_count() const;
  bool all_finite() const;

  bool operator==(const Mlp&) const = default;

 private:
  void run_forward(std::span<const Real> states, std::size_t rows, Workspace<Real>& ws) const;

  MlpSpec spec_;
  ParameterSet<Real> params_;
  ParameterSet<Real> cache_;
  kernels::Exec exec_ = kernels::Exec::parallel;
};

// Deep copy for the target network. Spelled out so sync points read clearly.
template <typename Real>
Mlp<Real> clone_into_target(const Mlp<Real>& online) {
  return online;
}

// Index of the largest entry; the lowest index wins ties.
template <typename Real>
int argmax(std::span<const Real> values) {
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  return best;
}

// Checkpoint: magic "AHQN", u32 version, u32 scalar bytes, u32 layer-size
// count, u32 sizes, then per layer weights and bias, then the RMSProp cache
// in the same order. Host byte order.
template <typename Real>
void save_checkpoint(const Mlp<Real>& net, std::ostream& os);
template <typename Real>
Mlp<Real> load_checkpoint(std::istream& is);

template <typename Real>
void save_checkpoint(const Mlp<Real>& net, const std::filesystem::path& path);
template <typename Real>
Mlp<Real> load_checkpoint(const std::filesystem::path& path);

using QNetwork = Mlp<float>;

}  // namespace airhockey::nn
