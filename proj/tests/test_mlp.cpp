#include <cmath>
#include <random>

#include "doctest.h"
#include "reconfig/mlp.hpp"

using namespace reconfig;

namespace {

// Straight loops over the stored layers: tanh on hidden layers, linear output.
std::vector<double> loop_forward(const Mlp& net, std::vector<double> x) {
  const auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& L = layers[l];
    std::vector<double> y(L.outputs);
    for (std::size_t o = 0; o < L.outputs; ++o) {
      double acc = L.bias[o];
      for (std::size_t i = 0; i < L.inputs; ++i) acc += L.weights[o * L.inputs + i] * x[i];
      y[o] = l + 1 < layers.size() ? std::tanh(acc) : acc;
    }
    x = std::move(y);
  }
  return x;
}

}  // namespace

TEST_CASE("seeded network matches an explicit-loop forward pass") {
  Mlp net({4, 7, 5, 3}, 11);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-2, 2);
  for (auto& L : net.layers())
    for (auto& b : L.bias) b = d(rng);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x(4);
    for (auto& v : x) v = d(rng);
    auto want = loop_forward(net, x);
    auto got = net.forward(x);
    REQUIRE(got.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
  }
}

TEST_CASE("zero network outputs zero; bias-only network outputs its bias") {
  auto net = Mlp::zeros({3, 4, 2});
  CHECK(net.forward(std::vector<double>{1, -2, 3}) == std::vector<double>{0, 0});
  net.layers().back().bias = {0.5, -1.5};
  CHECK(net.forward(std::vector<double>{9, 9, 9}) == std::vector<double>{0.5, -1.5});
}

TEST_CASE("same seed gives the same weights, different seeds differ") {
  CHECK(Mlp({3, 5, 1}, 4) == Mlp({3, 5, 1}, 4));
  CHECK_FALSE(Mlp({3, 5, 1}, 4) == Mlp({3, 5, 1}, 5));
}

TEST_CASE("flat parameter vector round trip") {
  Mlp net({2, 3, 1}, 9);
  CHECK(net.parameter_count() == 2 * 3 + 3 + 3 * 1 + 1);
  auto p = net.parameters();
  for (auto& v : p) v *= 2;
  net.set_parameters(p);
  CHECK(net.parameters() == p);
}

TEST_CASE("backward matches central differences of a scalar output") {
  Mlp net({3, 6, 2}, 21);
  const std::vector<double> x{0.3, -0.7, 1.1};
  const std::vector<double> dout{1.0, -0.5};
  auto trace = net.forward_trace(x);
  std::vector<double> grad(net.parameter_count(), 0.0);
  net.backward(trace, dout, grad);

  auto p = net.parameters();
  const double h = 1e-5;
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto q = p;
    q[i] = p[i] + h;
    net.set_parameters(q);
    auto a = net.forward(x);
    q[i] = p[i] - h;
    net.set_parameters(q);
    auto b = net.forward(x);
    const double fd = ((a[0] - b[0]) * dout[0] + (a[1] - b[1]) * dout[1]) / (2 * h);
    CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-6));
  }
  net.set_parameters(p);
}
