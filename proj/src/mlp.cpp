#include "reconfig/mlp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace reconfig {

namespace {

std::vector<DenseLayer> shaped(const std::vector<std::size_t>& sizes) {
  if (sizes.size() < 2) throw std::invalid_argument("mlp needs at least input and output sizes");
  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    if (sizes[i] == 0 || sizes[i + 1] == 0) throw std::invalid_argument("mlp layer of width 0");
    DenseLayer l;
    l.inputs = sizes[i];
    l.outputs = sizes[i + 1];
    l.weights.assign(l.inputs * l.outputs, 0.0);
    l.bias.assign(l.outputs, 0.0);
    layers.push_back(std::move(l));
  }
  return layers;
}

}  // namespace

Mlp::Mlp(std::vector<std::size_t> layer_sizes, std::uint64_t seed)
    : layers_(shaped(layer_sizes)), seed_(seed) {
  std::mt19937_64 rng(seed);
  for (auto& l : layers_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.inputs + l.outputs));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& w : l.weights) w = dist(rng);
  }
}

Mlp Mlp::zeros(std::vector<std::size_t> layer_sizes) {
  Mlp m;
  m.layers_ = shaped(layer_sizes);
  return m;
}

Mlp Mlp::from_layers(std::vector<DenseLayer> layers, std::uint64_t seed) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.weights.size() != l.inputs * l.outputs || l.bias.size() != l.outputs)
      throw std::invalid_argument("mlp layer shape mismatch");
    if (i > 0 && layers[i - 1].outputs != l.inputs)
      throw std::invalid_argument("mlp adjacent layer dimensions incompatible");
  }
  Mlp m;
  m.layers_ = std::move(layers);
  m.seed_ = seed;
  return m;
}

std::vector<std::size_t> Mlp::layer_sizes() const {
  std::vector<std::size_t> sizes;
  if (layers_.empty()) return sizes;
  sizes.push_back(layers_.front().inputs);
  for (const auto& l : layers_) sizes.push_back(l.outputs);
  return sizes;
}

Mlp::Trace Mlp::forward_trace(std::span<const double> x) const {
  if (x.size() != input_size()) throw std::invalid_argument("mlp input dimension mismatch");
  Trace t;
  t.values.emplace_back(x.begin(), x.end());
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const auto& l = layers_[li];
    const auto& in = t.values.back();
    std::vector<double> out(l.outputs);
    const bool hidden = li + 1 < layers_.size();
    for (std::size_t o = 0; o < l.outputs; ++o) {
      double acc = l.bias[o];
      const double* row = &l.weights[o * l.inputs];
      for (std::size_t i = 0; i < l.inputs; ++i) acc += row[i] * in[i];
      out[o] = hidden ? std::tanh(acc) : acc;
    }
    t.values.push_back(std::move(out));
  }
  return t;
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
  return std::move(forward_trace(x).values.back());
}

void Mlp::backward(const Trace& trace, std::span<const double> grad_output,
                   std::span<double> grad) const {
  if (grad.size() != parameter_count()) throw std::invalid_argument("gradient buffer size");
  if (grad_output.size() != output_size()) throw std::invalid_argument("output gradient size");

  // Offsets of each layer's block in the flat parameter vector.
  std::vector<std::size_t> offset(layers_.size());
  std::size_t pos = 0;
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    offset[li] = pos;
    pos += layers_[li].weights.size() + layers_[li].bias.size();
  }

  std::vector<double> delta(grad_output.begin(), grad_output.end());
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const auto& l = layers_[li];
    const auto& in = trace.values[li];
    double* gw = grad.data() + offset[li];
    double* gb = gw + l.weights.size();
    for (std::size_t o = 0; o < l.outputs; ++o) {
      gb[o] += delta[o];
      for (std::size_t i = 0; i < l.inputs; ++i) gw[o * l.inputs + i] += delta[o] * in[i];
    }
    if (li == 0) break;
    std::vector<double> prev(l.inputs, 0.0);
    for (std::size_t o = 0; o < l.outputs; ++o) {
      for (std::size_t i = 0; i < l.inputs; ++i) prev[i] += l.weights[o * l.inputs + i] * delta[o];
    }
    // Input of this layer is the tanh output of the previous one.
    for (std::size_t i = 0; i < l.inputs; ++i) prev[i] *= 1.0 - in[i] * in[i];
    delta = std::move(prev);
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

std::vector<double> Mlp::parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& l : layers_) {
    flat.insert(flat.end(), l.weights.begin(), l.weights.end());
    flat.insert(flat.end(), l.bias.begin(), l.bias.end());
  }
  return flat;
}

void Mlp::set_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) throw std::invalid_argument("parameter vector size");
  std::size_t pos = 0;
  for (auto& l : layers_) {
    for (auto& w : l.weights) w = flat[pos++];
    for (auto& b : l.bias) b = flat[pos++];
  }
}

bool Mlp::all_finite() const {
  for (const auto& l : layers_) {
    for (double w : l.weights)
      if (!std::isfinite(w)) return false;
    for (double b : l.bias)
      if (!std::isfinite(b)) return false;
  }
  return true;
}

}  // namespace reconfig
