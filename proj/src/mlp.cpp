#include "airhockey/mlp.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace airhockey::nn {

namespace {

constexpr char kMagic[4] = {'A', 'H', 'Q', 'N'};
constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: unexpected end of stream");
  return v;
}

template <typename Stored, typename Real>
void read_array(std::istream& is, std::vector<Real>& dst) {
  std::vector<Stored> buf(dst.size());
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(Stored)));
  if (!is) throw std::runtime_error("checkpoint: truncated parameter block");
  for (std::size_t k = 0; k < buf.size(); ++k) dst[k] = static_cast<Real>(buf[k]);
}

template <typename Real>
void write_array(std::ostream& os, const std::vector<Real>& src) {
  os.write(reinterpret_cast<const char*>(src.data()), static_cast<std::streamsize>(src.size() * sizeof(Real)));
}

template <typename Real>
bool finite_set(const ParameterSet<Real>& set) {
  for (const auto& l : set) {
    for (Real v : l.weights)
      if (!std::isfinite(v)) return false;
    for (Real v : l.bias)
      if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2) throw std::invalid_argument("mlp: need at least input and output sizes");
  for (int s : layer_sizes)
    if (s <= 0) throw std::invalid_argument("mlp: layer sizes must be positive");
}

template <typename Real>
ParameterSet<Real> zeros_like(const MlpSpec& spec) {
  ParameterSet<Real> set(spec.layer_count());
  for (std::size_t l = 0; l < set.size(); ++l) {
    set[l].in = static_cast<std::size_t>(spec.layer_sizes[l]);
    set[l].out = static_cast<std::size_t>(spec.layer_sizes[l + 1]);
    set[l].weights.assign(set[l].in * set[l].out, Real(0));
    set[l].bias.assign(set[l].out, Real(0));
  }
  return set;
}

template <typename Real>
Mlp<Real>::Mlp(MlpSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  params_ = zeros_like<Real>(spec_);
  cache_ = zeros_like<Real>(spec_);
}

template <typename Real>
Mlp<Real> Mlp<Real>::initialized(MlpSpec spec, std::uint64_t seed) {
  Mlp net(std::move(spec));
  std::mt19937_64 rng(seed);
  for (auto& layer : net.params_) {
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (auto& w : layer.weights) w = static_cast<Real>(u(rng));
  }
  return net;
}

template <typename Real>
void Mlp<Real>::run_forward(std::span<const Real> states, std::size_t rows,
                            Workspace<Real>& ws) const {
  const std::size_t layers = params_.size();
  ws.activations.resize(layers + 1);
  ws.activations[0].assign(states.begin(), states.begin() + static_cast<std::ptrdiff_t>(rows * spec_.inputs()));
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& layer = params_[l];
    auto& out = ws.activations[l + 1];
    out.resize(rows * layer.out);
    kernels::dense_forward<Real>(exec_, ws.activations[l], rows, layer.in, layer.weights,
                                 layer.bias, layer.out, out, l + 1 < layers);
  }
}

template <typename Real>
std::vector<Real> Mlp<Real>::forward(std::span<const Real> features) const {
  if (features.size() != spec_.inputs())
    throw std::invalid_argument("mlp: expected " + std::to_string(spec_.inputs()) + " features");
  Workspace<Real> ws;
  run_forward(features, 1, ws);
  return std::move(ws.activations.back());
}

template <typename Real>
void Mlp<Real>::forward_batch(std::span<const Real> states, std::size_t rows,
                              Workspace<Real>& ws, std::vector<Real>& out) const {
  if (states.size() < rows * spec_.inputs()) throw std::invalid_argument("mlp: state block too small");
  run_forward(states, rows, ws);
  out = ws.activations.back();
}

template <typename Real>
Real Mlp<Real>::loss(const TrainingBatch<Real>& batch) const {
  Workspace<Real> ws;
  run_forward(batch.states, batch.rows, ws);
  const auto& q = ws.activations.back();
  const std::size_t a_dim = spec_.outputs();
  Real total = 0;
  for (std::size_t r = 0; r < batch.rows; ++r) {
    const Real e = batch.targets[r] - q[r * a_dim + static_cast<std::size_t>(batch.actions[r])];
    total += e * e;
  }
  return total / static_cast<Real>(batch.rows);
}

template <typename Real>
Real Mlp<Real>::backward(const TrainingBatch<Real>& batch, Workspace<Real>& ws,
                         ParameterSet<Real>& grad) const {
  const std::size_t rows = batch.rows;
  if (rows == 0 || batch.actions.size() != rows || batch.targets.size() != rows)
    throw std::invalid_argument("mlp: malformed training batch");
  if (grad.size() != params_.size()) grad = zeros_like<Real>(spec_);

  run_forward(batch.states, rows, ws);
  const std::size_t layers = params_.size();
  const std::size_t a_dim = spec_.outputs();
  const auto& q = ws.activations.back();

  ws.deltas.resize(layers);
  auto& dq = ws.deltas[layers - 1];
  dq.assign(rows * a_dim, Real(0));
  Real total = 0;
  const Real scale = Real(2) / static_cast<Real>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t idx = r * a_dim + static_cast<std::size_t>(batch.actions[r]);
    const Real e = batch.targets[r] - q[idx];
    total += e * e;
    dq[idx] = -scale * e;
  }

  for (std::size_t l = layers; l-- > 0;) {
    const auto& layer = params_[l];
    kernels::dense_backward_params<Real>(exec_, ws.activations[l], rows, layer.in, ws.deltas[l],
                                         layer.out, grad[l].weights, grad[l].bias);
    if (l > 0) {
      auto& din = ws.deltas[l - 1];
      din.resize(rows * layer.in);
      kernels::dense_backward_input_relu<Real>(exec_, ws.deltas[l], rows, layer.out,
                                               layer.weights, layer.in, ws.activations[l], din);
    }
  }
  return total / static_cast<Real>(rows);
}

template <typename Real>
void Mlp<Real>::rmsprop_step(const ParameterSet<Real>& grad, const RmsPropParams& opt) {
  if (grad.size() != params_.size()) throw std::invalid_argument("mlp: gradient shape mismatch");
  const Real lr = static_cast<Real>(opt.learning_rate);
  const Real decay = static_cast<Real>(opt.decay);
  const Real eps = static_cast<Real>(opt.epsilon);
  for (std::size_t l = 0; l < params_.size(); ++l) {
    kernels::rmsprop_update<Real>(exec_, params_[l].weights, cache_[l].weights, grad[l].weights,
                                  lr, decay, eps);
    kernels::rmsprop_update<Real>(exec_, params_[l].bias, cache_[l].bias, grad[l].bias, lr,
                                  decay, eps);
  }
}

template <typename Real>
std::size_t Mlp<Real>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : params_) n += l.weights.size() + l.bias.size();
  return n;
}

template <typename Real>
bool Mlp<Real>::all_finite() const {
  return finite_set(params_) && finite_set(cache_);
}

template <typename Real>
void save_checkpoint(const Mlp<Real>& net, std::ostream& os) {
  os.write(kMagic, sizeof(kMagic));
  write_pod(os, kCheckpointVersion);
  write_pod(os, static_cast<std::uint32_t>(sizeof(Real)));
  const auto& sizes = net.spec().layer_sizes;
  write_pod(os, static_cast<std::uint32_t>(sizes.size()));
  for (int s : sizes) write_pod(os, static_cast<std::uint32_t>(s));
  for (const auto* set : {&net.params(), &net.rmsprop_cache()}) {
    for (const auto& l : *set) {
      write_array(os, l.weights);
      write_array(os, l.bias);
    }
  }
  if (!os) throw std::runtime_error("checkpoint: write failed");
}

template <typename Real>
Mlp<Real> load_checkpoint(std::istream& is) {
  char magic[4];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("checkpoint: bad magic");
  const auto version = read_pod<std::uint32_t>(is);
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  const auto scalar = read_pod<std::uint32_t>(is);
  if (scalar != 4 && scalar != 8) throw std::runtime_error("checkpoint: bad scalar width");
  const auto count = read_pod<std::uint32_t>(is);
  if (count < 2 || count > 64) throw std::runtime_error("checkpoint: bad layer count");
  MlpSpec spec;
  spec.layer_sizes.clear();
  for (std::uint32_t k = 0; k < count; ++k) spec.layer_sizes.push_back(static_cast<int>(read_pod<std::uint32_t>(is)));
  Mlp<Real> net(spec);
  for (auto* set : {&net.params(), &net.rmsprop_cache()}) {
    for (auto& l : *set) {
      if (scalar == 4) {
        read_array<float>(is, l.weights);
        read_array<float>(is, l.bias);
      } else {
        read_array<double>(is, l.weights);
        read_array<double>(is, l.bias);
      }
    }
  }
  return net;
}

template <typename Real>
void save_checkpoint(const Mlp<Real>& net, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
  save_checkpoint(net, os);
}

template <typename Real>
Mlp<Real> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path.string());
  try {
    return load_checkpoint<Real>(is);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

template class Mlp<float>;
template class Mlp<double>;
template ParameterSet<float> zeros_like<float>(const MlpSpec&);
template ParameterSet<double> zeros_like<double>(const MlpSpec&);
template void save_checkpoint<float>(const Mlp<float>&, std::ostream&);
template void save_checkpoint<double>(const Mlp<double>&, std::ostream&);
template Mlp<float> load_checkpoint<float>(std::istream&);
template Mlp<double> load_checkpoint<double>(std::istream&);
template void save_checkpoint<float>(const Mlp<float>&, const std::filesystem::path&);
template void save_checkpoint<double>(const Mlp<double>&, const std::filesystem::path&);
template Mlp<float> load_checkpoint<float>(const std::filesystem::path&);
template Mlp<double> load_checkpoint<double>(const std::filesystem::path&);

}  // namespace airhockey::nn
