#pragma once

// Small fully connected network: tanh hidden layers, linear output layer.
// Parameters are exposed as one flat vector (per layer: weights row-major,
// then bias) so trainers and finite-difference checks share one ordering.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace reconfig {

struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;  // outputs x inputs, row-major
  std::vector<double> bias;     // outputs
  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

class Mlp {
public:
  /// Per-layer activations from a forward pass; values[0] is the input.
  struct Trace {
    std::vector<std::vector<double>> values;
  };

  Mlp() = default;
  /// Xavier-uniform weights, zero biases, drawn from `seed`.
  Mlp(std::vector<std::size_t> layer_sizes, std::uint64_t seed);
  static Mlp zeros(std::vector<std::size_t> layer_sizes);
  static Mlp from_layers(std::vector<DenseLayer> layers, std::uint64_t seed);

  std::size_t input_size() const { return layers_.empty() ? 0 : layers_.front().inputs; }
  std::size_t output_size() const { return layers_.empty() ? 0 : layers_.back().outputs; }
  std::vector<std::size_t> layer_sizes() const;
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  std::uint64_t seed() const { return seed_; }

  std::vector<double> forward(std::span<const double> x) const;
  Trace forward_trace(std::span<const double> x) const;

  /// Adds d(loss)/d(parameters) to `grad` given d(loss)/d(output).
  void backward(const Trace& trace, std::span<const double> grad_output,
                std::span<double> grad) const;

  std::size_t parameter_count() const;
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> flat);

  bool all_finite() const;

  friend bool operator==(const Mlp&, const Mlp&) = default;

private:
  std::vector<DenseLayer> layers_;
  std::uint64_t seed_ = 0;
};

}  // namespace reconfig
