#include <catch2/catch_amalgamated.hpp>

#include "encscan/nn/network.hpp"
#include "encscan/nn/optim.hpp"
#include "encscan/rng.hpp"

using namespace encscan;
using nn::ArchSpec;
using nn::Network;

namespace {

// Scalar probe J(x) = sum(emb * g) so that dJ/d(emb) = g. Central finite
// differences of J against the analytic backward pass.
template <typename T>
T probe_value(const Network<T>& net, const Tensor<T>& x, const Tensor<T>& g) {
  Tensor<T> emb = net.forward(x);
  T acc{0};
  for (std::size_t i = 0; i < emb.size(); ++i) acc += emb[i] * g[i];
  return acc;
}

Tensor<double> random_batch(Rng& rng, std::size_t n, Shape3 s) {
  Tensor<double> x({n, s[0], s[1], s[2]});
  for (auto& v : x) v = rng.uniform(0.05, 0.95);
  return x;
}

ArchSpec tiny_arch() {
  return ArchSpec::small_conv({8, 8, 3}, 10, {4, 6});
}

}  // namespace

TEST_CASE("conv output shapes") {
  nn::Conv2d<float> conv(3, 8, 3, 1, 1);
  CHECK(conv.output_shape({32, 32, 3}) == Shape3{32, 32, 8});
  nn::AvgPool2<float> pool;
  CHECK(pool.output_shape({32, 32, 8}) == Shape3{16, 16, 8});
  CHECK_THROWS(pool.output_shape({9, 9, 8}));
  CHECK_THROWS(conv.output_shape({32, 32, 4}));
}

TEST_CASE("network forward shape and determinism") {
  ArchSpec arch = tiny_arch();
  Network<float> net(arch, 42);
  Rng rng(1);
  Tensor<float> x({3, 8, 8, 3});
  for (auto& v : x) v = static_cast<float>(rng.uniform());
  Tensor<float> e1 = net.forward(x);
  Tensor<float> e2 = net.forward(x);
  CHECK(e1.shape() == Shape({3, 10}));
  CHECK(e1 == e2);

  Network<float> net_same(arch, 42);
  Network<float> net_other(arch, 43);
  CHECK(net_same.forward(x) == e1);
  CHECK_FALSE(net_other.forward(x) == e1);
}

TEST_CASE("batch shape mismatch is rejected") {
  Network<float> net(tiny_arch(), 42);
  Tensor<float> bad({2, 8, 8, 4});
  CHECK_THROWS_AS(net.forward(bad), std::invalid_argument);
}

TEST_CASE("input gradient matches finite differences") {
  Network<double> net(tiny_arch(), 7);
  Rng rng(11);
  Tensor<double> x = random_batch(rng, 2, {8, 8, 3});
  Tensor<double> g({2, 10});
  for (auto& v : g) v = rng.normal();

  nn::FwdState<double> st;
  net.forward(x, &st);
  Tensor<double> dx = net.backward(st, g);
  REQUIRE(dx.shape() == x.shape());

  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t i = rng.index(x.size());
    Tensor<double> xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (probe_value(net, xp, g) - probe_value(net, xm, g)) / (2 * h);
    const double denom = std::max({std::abs(fd), std::abs(dx[i]), 1e-6});
    CHECK(std::abs(fd - dx[i]) / denom < 1e-4);
  }
}

TEST_CASE("parameter gradients match finite differences") {
  Network<double> net(tiny_arch(), 7);
  Rng rng(13);
  Tensor<double> x = random_batch(rng, 2, {8, 8, 3});
  Tensor<double> g({2, 10});
  for (auto& v : g) v = rng.normal();

  nn::FwdState<double> st;
  net.forward(x, &st);
  std::vector<Tensor<double>> grads;
  net.backward(st, g, &grads);
  auto params = net.params();
  REQUIRE(grads.size() == params.size());

  const double h = 1e-5;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    REQUIRE(grads[pi].shape() == params[pi]->shape());
    for (int trial = 0; trial < 5; ++trial) {
      const std::size_t i = rng.index(params[pi]->size());
      const double orig = (*params[pi])[i];
      (*params[pi])[i] = orig + h;
      const double jp = probe_value(net, x, g);
      (*params[pi])[i] = orig - h;
      const double jm = probe_value(net, x, g);
      (*params[pi])[i] = orig;
      const double fd = (jp - jm) / (2 * h);
      const double denom = std::max({std::abs(fd), std::abs(grads[pi][i]), 1e-6});
      CHECK(std::abs(fd - grads[pi][i]) / denom < 1e-4);
    }
  }
}

TEST_CASE("adam minimizes a quadratic") {
  Tensor<float> p({4}, 5.0f);
  nn::Adam<float> opt({&p}, 0.1f);
  for (int it = 0; it < 500; ++it) {
    std::vector<Tensor<float>> g(1, Tensor<float>({4}));
    for (std::size_t i = 0; i < 4; ++i) g[0][i] = 2 * (p[i] - 1.0f);
    opt.step(g);
  }
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(p[i] - 1.0f) < 1e-3);
}

TEST_CASE("network copy is deep") {
  Network<float> a(tiny_arch(), 9);
  Network<float> b = a;
  Rng rng(3);
  Tensor<float> x({1, 8, 8, 3});
  for (auto& v : x) v = static_cast<float>(rng.uniform());
  Tensor<float> before = a.forward(x);
  (*b.params()[0])[0] += 1.0f;
  CHECK(a.forward(x) == before);
  CHECK_FALSE(b.forward(x) == before);
}

TEST_CASE("param names are stable") {
  Network<float> net(tiny_arch(), 1);
  auto names = net.param_names();
  REQUIRE(names.size() == net.params().size());
  CHECK(names[0] == "0.conv.w");
  CHECK(names[1] == "0.conv.b");
}
