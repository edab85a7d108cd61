#pragma once

#include <cstddef>
#include <span>

// Dense-layer kernels behind the MLP. Every kernel exists twice: a plain
// serial reference and an OpenMP version. The OpenMP versions split work so
// that each output element is produced by exactly one thread with the same
// summation order as the reference, which makes the two bit-identical.
//
// Layouts (row-major):
//   inputs   rows x in_dim
//   weights  in_dim x out_dim   (row i holds the fan-out of input i)
//   outputs  rows x out_dim
namespace airhockey::nn::kernels {

enum class Exec { serial, parallel };

// out = act(in * W + b); act is ReLU when relu is set, identity otherwise.
template <typename Real>
void dense_forward(Exec exec, std::span<const Real> in, std::size_t rows, std::size_t in_dim,
                   std::span<const Real> weights, std::span<const Real> bias,
                   std::size_t out_dim, std::span<Real> out, bool relu);

// dW = in^T * dout, db = column sums of dout. Both are overwritten.
template <typename Real>
void dense_backward_params(Exec exec, std::span<const Real> in, std::size_t rows,
                           std::size_t in_dim, std::span<const Real> dout, std::size_t out_dim,
                           std::span<Real> dweights, std::span<Real> dbias);

// din = (dout * W^T) masked by (activation > 0); activation is the ReLU
// output that fed this layer.
template <typename Real>
void dense_backward_input_relu(Exec exec, std::span<const Real> dout, std::size_t rows,
                               std::size_t out_dim, std::span<const Real> weights,
                               std::size_t in_dim, std::span<const Real> activation,
                               std::span<Real> din);

// cache <- decay*cache + (1-decay)*g^2 ; param <- param - lr*g/(sqrt(cache)+eps)
template <typename Real>
void rmsprop_update(Exec exec, std::span<Real> param, std::span<Real> cache,
                    std::span<const Real> grad, Real lr, Real decay, Real epsilon);

// Threads the OpenMP kernels will use (1 when built without OpenMP).
int max_threads();

}  // namespace airhockey::nn::kernels
