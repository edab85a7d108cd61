#include "airhockey/kernels.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace airhockey::nn::kernels {

namespace {

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelThreshold = 1u << 15;

template <typename Real>
void axpy(Real a, const Real* x, Real* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += a * x[k];
}

// Shared by both execution paths so the reduction order is the same.
template <typename Real>
[[gnu::noinline]] Real dot(const Real* a, const Real* b, std::size_t n) {
  Real acc = 0;
  for (std::size_t k = 0; k < n; ++k) acc += a[k] * b[k];
  return acc;
}

template <typename Real>
void forward_row(const Real* x, std::size_t in_dim, const Real* w, const Real* b,
                 std::size_t out_dim, Real* y, bool relu) {
  for (std::size_t o = 0; o < out_dim; ++o) y[o] = b[o];
  for (std::size_t i = 0; i < in_dim; ++i) axpy(x[i], w + i * out_dim, y, out_dim);
  if (relu)
    for (std::size_t o = 0; o < out_dim; ++o) y[o] = y[o] > Real(0) ? y[o] : Real(0);
}

template <typename Real>
void backward_input_row(const Real* dy, std::size_t out_dim, const Real* w, std::size_t in_dim,
                        const Real* act, Real* dx) {
  for (std::size_t i = 0; i < in_dim; ++i)
    dx[i] = act[i] > Real(0) ? dot(dy, w + i * out_dim, out_dim) : Real(0);
}

template <typename Real>
void rmsprop_element(Real& p, Real& c, Real g, Real lr, Real decay, Real eps) {
  c = decay * c + (Real(1) - decay) * g * g;
  p -= lr * g / (std::sqrt(c) + eps);
}

}  // namespace

template <typename Real>
void dense_forward(Exec exec, std::span<const Real> in, std::size_t rows, std::size_t in_dim,
                   std::span<const Real> weights, std::span<const Real> bias,
                   std::size_t out_dim, std::span<Real> out, bool relu) {
  const Real* x = in.data();
  const Real* w = weights.data();
  const Real* b = bias.data();
  Real* y = out.data();
  if (exec == Exec::serial) {
    for (std::size_t r = 0; r < rows; ++r)
      forward_row(x + r * in_dim, in_dim, w, b, out_dim, y + r * out_dim, relu);
    return;
  }
  const bool go_wide = rows * in_dim * out_dim >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (go_wide)
  for (std::size_t r = 0; r < rows; ++r)
    forward_row(x + r * in_dim, in_dim, w, b, out_dim, y + r * out_dim, relu);
}

template <typename Real>
void dense_backward_params(Exec exec, std::span<const Real> in, std::size_t rows,
                           std::size_t in_dim, std::span<const Real> dout, std::size_t out_dim,
                           std::span<Real> dweights, std::span<Real> dbias) {
  const Real* x = in.data();
  const Real* dy = dout.data();
  Real* dw = dweights.data();
  Real* db = dbias.data();

  if (exec == Exec::serial) {
    for (std::size_t k = 0; k < in_dim * out_dim; ++k) dw[k] = 0;
    for (std::size_t o = 0; o < out_dim; ++o) db[o] = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      const Real* dyr = dy + r * out_dim;
      for (std::size_t i = 0; i < in_dim; ++i) axpy(x[r * in_dim + i], dyr, dw + i * out_dim, out_dim);
      axpy(Real(1), dyr, db, out_dim);
    }
    return;
  }

  const bool go_wide = rows * in_dim * out_dim >= kParallelThreshold;
#pragma omp parallel if (go_wide)
  {
    // Each thread owns whole rows of dW; samples are folded in order.
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < in_dim; ++i) {
      Real* dwi = dw + i * out_dim;
      for (std::size_t o = 0; o < out_dim; ++o) dwi[o] = 0;
      for (std::size_t r = 0; r < rows; ++r) axpy(x[r * in_dim + i], dy + r * out_dim, dwi, out_dim);
    }
#pragma omp single
    {
      for (std::size_t o = 0; o < out_dim; ++o) db[o] = 0;
      for (std::size_t r = 0; r < rows; ++r) axpy(Real(1), dy + r * out_dim, db, out_dim);
    }
  }
}

template <typename Real>
void dense_backward_input_relu(Exec exec, std::span<const Real> dout, std::size_t rows,
                               std::size_t out_dim, std::span<const Real> weights,
                               std::size_t in_dim, std::span<const Real> activation,
                               std::span<Real> din) {
  const Real* dy = dout.data();
  const Real* w = weights.data();
  const Real* a = activation.data();
  Real* dx = din.data();
  if (exec == Exec::serial) {
    for (std::size_t r = 0; r < rows; ++r)
      backward_input_row(dy + r * out_dim, out_dim, w, in_dim, a + r * in_dim, dx + r * in_dim);
    return;
  }
  const bool go_wide = rows * in_dim * out_dim >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (go_wide)
  for (std::size_t r = 0; r < rows; ++r)
    backward_input_row(dy + r * out_dim, out_dim, w, in_dim, a + r * in_dim, dx + r * in_dim);
}

template <typename Real>
void rmsprop_update(Exec exec, std::span<Real> param, std::span<Real> cache,
                    std::span<const Real> grad, Real lr, Real decay, Real epsilon) {
  const std::size_t n = param.size();
  Real* p = param.data();
  Real* c = cache.data();
  const Real* g = grad.data();
  if (exec == Exec::serial) {
    for (std::size_t k = 0; k < n; ++k) rmsprop_element(p[k], c[k], g[k], lr, decay, epsilon);
    return;
  }
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (std::size_t k = 0; k < n; ++k) rmsprop_element(p[k], c[k], g[k], lr, decay, epsilon);
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

#define AIRHOCKEY_INSTANTIATE_KERNELS(Real)                                                      \
  template void dense_forward<Real>(Exec, std::span<const Real>, std::size_t, std::size_t,       \
                                    std::span<const Real>, std::span<const Real>, std::size_t,   \
                                    std::span<Real>, bool);                                      \
  template void dense_backward_params<Real>(Exec, std::span<const Real>, std::size_t,            \
                                            std::size_t, std::span<const Real>, std::size_t,     \
                                            std::span<Real>, std::span<Real>);                   \
  template void dense_backward_input_relu<Real>(Exec, std::span<const Real>, std::size_t,        \
                                                std::size_t, std::span<const Real>,              \
                                                std::size_t, std::span<const Real>,              \
                                                std::span<Real>);                                \
  template void rmsprop_update<Real>(Exec, std::span<Real>, std::span<Real>,                     \
                                     std::span<const Real>, Real, Real, Real);

AIRHOCKEY_INSTANTIATE_KERNELS(float)
AIRHOCKEY_INSTANTIATE_KERNELS(double)

#undef AIRHOCKEY_INSTANTIATE_KERNELS

}  // namespace airhockey::nn::kernels
