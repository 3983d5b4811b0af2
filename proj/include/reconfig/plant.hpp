#pragma once

// Ground-truth synthetic process used as the "real system": closed-form
// polynomial NARX dynamics with additive actuation disturbances.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "reconfig/dataset.hpp"
#include "reconfig/model.hpp"

namespace reconfig {

using Matrix = std::vector<std::vector<double>>;  // row-major, rows = outputs

/// y(k) = bias + sum_l ar[l-1] y(k-l) + sum_l input[l] u~(k-l)
///      + coupling w(k) + quadratic u~(k)^2
/// where u~(k) = u(k) + du~(k) is the actuation the process actually sees.
struct PlantDynamics {
  std::size_t outputs = 1;
  std::size_t actuations = 1;
  std::size_t coupling_dim = 0;
  std::vector<double> bias;
  std::vector<Matrix> ar;      // lags 1..: outputs x outputs
  std::vector<Matrix> input;   // lags 0..: outputs x actuations
  Matrix coupling;             // outputs x coupling_dim
  Matrix quadratic;            // outputs x actuations, on the current actuation

  void check() const;
  friend bool operator==(const PlantDynamics&, const PlantDynamics&) = default;
};

enum class DisturbanceKind { none, step, drift, periodic };

struct DisturbanceProfile {
  DisturbanceKind kind = DisturbanceKind::none;
  double magnitude = 0.0;
  long onset = 1;
  double period = 10.0;  // periodic only
  /// Affected actuation channels; empty means all.
  std::vector<std::size_t> channels;
  friend bool operator==(const DisturbanceProfile&, const DisturbanceProfile&) = default;
};

/// Disturbance on one affected channel at cycle k.
///   step:     magnitude for k >= onset
///   drift:    magnitude * (k - onset + 1) for k >= onset
///   periodic: magnitude * sin(2 pi (k - onset) / period) for k >= onset
double disturbance_at(const DisturbanceProfile& profile, long k);

struct PlantSpec {
  PlantDynamics dynamics;
  DisturbanceProfile disturbance;
  double noise_std = 0.0;
  std::uint64_t seed = 0;

  void check() const;
};

class PlantState {
public:
  explicit PlantState(const PlantSpec& spec);

  const std::deque<std::vector<double>>& outputs() const { return outputs_; }
  const std::deque<std::vector<double>>& actuations() const { return actuations_; }

private:
  friend struct PlantStepper;
  std::deque<std::vector<double>> outputs_;     // true outputs, [0] = y(k-1)
  std::deque<std::vector<double>> actuations_;  // effective actuations, [0] = u~(k-1)
  std::mt19937_64 noise_rng_;
};

struct PlantStep {
  std::vector<double> y;            // measured output
  std::vector<double> disturbance;  // realized du~(k)
};

PlantStep step_plant(const PlantSpec& spec, PlantState& state, const std::vector<double>& u,
                     const std::vector<double>& w, long k);

/// Per-cycle excitation: uniform actuation within bounds, uniform coupling
/// within [coupling_lo, coupling_hi].
struct Excitation {
  std::vector<ParameterBound> actuation;
  double coupling_lo = 0.0;
  double coupling_hi = 1.0;
};

OperatingDataset generate_dataset(const PlantSpec& spec, const Excitation& excitation,
                                  std::size_t cycles, std::uint64_t seed);

}  // namespace reconfig
