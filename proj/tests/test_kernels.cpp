#include <doctest.h>

#include <random>
#include <vector>

#include "airhockey/kernels.hpp"
#include "airhockey/mlp.hpp"

using namespace airhockey::nn;
using kernels::Exec;

namespace {

std::vector<float> random_vec(std::size_t n, std::uint64_t seed, float lo = -1, float hi = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(lo, hi);
  std::vector<float> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

// Sizes large enough that the parallel branch is taken.
TEST_CASE("dense_forward serial and parallel agree bit for bit") {
  const std::size_t rows = 512, in = 100, out = 100;
  const auto x = random_vec(rows * in, 1), w = random_vec(in * out, 2), b = random_vec(out, 3);
  for (bool relu : {true, false}) {
    std::vector<float> s(rows * out), p(rows * out);
    kernels::dense_forward<float>(Exec::serial, x, rows, in, w, b, out, s, relu);
    kernels::dense_forward<float>(Exec::parallel, x, rows, in, w, b, out, p, relu);
    CHECK(s == p);
  }
}

TEST_CASE("dense_forward computes in*W + b") {
  const std::vector<double> x{1, 2}, w{1, 2, 3, 4, 5, 6}, b{0.5, -100, 0};
  std::vector<double> out(3);
  kernels::dense_forward<double>(Exec::serial, x, 1, 2, w, b, 3, out, true);
  CHECK(out == std::vector<double>{9.5, 0, 15});
}

TEST_CASE("backward kernels serial and parallel agree bit for bit") {
  const std::size_t rows = 512, in = 100, out = 100;
  const auto x = random_vec(rows * in, 4, 0, 1), dout = random_vec(rows * out, 5),
             w = random_vec(in * out, 6);
  std::vector<float> dws(in * out), dwp(in * out), dbs(out), dbp(out);
  kernels::dense_backward_params<float>(Exec::serial, x, rows, in, dout, out, dws, dbs);
  kernels::dense_backward_params<float>(Exec::parallel, x, rows, in, dout, out, dwp, dbp);
  CHECK(dws == dwp);
  CHECK(dbs == dbp);

  auto act = random_vec(rows * in, 7);
  for (auto& a : act) a = a < 0 ? 0 : a;
  std::vector<float> dis(rows * in), dip(rows * in);
  kernels::dense_backward_input_relu<float>(Exec::serial, dout, rows, out, w, in, act, dis);
  kernels::dense_backward_input_relu<float>(Exec::parallel, dout, rows, out, w, in, act, dip);
  CHECK(dis == dip);
  for (std::size_t i = 0; i < act.size(); ++i)
    if (act[i] == 0) CHECK(dis[i] == 0);
}

TEST_CASE("rmsprop kernel serial and parallel agree bit for bit") {
  const std::size_t n = 100000;
  auto ps = random_vec(n, 8), cs = random_vec(n, 9, 0, 1);
  auto pp = ps, cp = cs;
  const auto g = random_vec(n, 10);
  kernels::rmsprop_update<float>(Exec::serial, ps, cs, g, 0.00025f, 0.95f, 0.01f);
  kernels::rmsprop_update<float>(Exec::parallel, pp, cp, g, 0.00025f, 0.95f, 0.01f);
  CHECK(ps == pp);
  CHECK(cs == cp);
}

TEST_CASE("full training step is identical under both execution modes") {
  const MlpSpec spec;
  auto serial = Mlp<float>::initialized(spec, 5);
  auto parallel = serial;
  serial.set_exec(Exec::serial);
  parallel.set_exec(Exec::parallel);

  TrainingBatch<float> batch;
  batch.rows = 256;
  batch.states = random_vec(batch.rows * 8, 11, 0, 1);
  std::mt19937_64 rng(12);
  for (std::size_t r = 0; r < batch.rows; ++r) {
    batch.actions.push_back(static_cast<int>(rng() % 25));
    batch.targets.push_back(static_cast<float>(rng() % 100) / 10.0f);
  }
  Workspace<float> ws_s, ws_p;
  auto gs = zeros_like<float>(spec), gp = zeros_like<float>(spec);
  for (int k = 0; k < 5; ++k) {
    const float ls = serial.backward(batch, ws_s, gs);
    const float lp = parallel.backward(batch, ws_p, gp);
    CHECK(ls == lp);
    CHECK(gs == gp);
    serial.rmsprop_step(gs, {});
    parallel.rmsprop_step(gp, {});
  }
  CHECK(serial.params() == parallel.params());
}
