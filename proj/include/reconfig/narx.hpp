#pragma once

// Adaptive process model of one module operator: a NARX predictor whose
// actuation inputs are corrected by an autoregressive disturbance estimator.
//
//   y^(k)   = f(y(k-1..k-ny), u^(k), u~(k-1..k-nu), w(k), k)
//   u^(k)   = u(k) + du^(k)                 (current, estimated disturbance)
//   u~(k-t) = u(k-t) + du~(k-t)             (lagged, observed disturbance)
//   du^(k)  = h(du~(k-1..k-nu), k)
//
// w(k) is the predecessor module's previous output; k enters both networks
// as the phase k / horizon.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "reconfig/dataset.hpp"
#include "reconfig/mlp.hpp"
#include "reconfig/model.hpp"

namespace reconfig {

class TrainingDiverged : public ReconfigError {
public:
  using ReconfigError::ReconfigError;
};

struct NarxShape {
  std::size_t outputs = 1;          // m_y
  std::size_t actuations = 1;       // m_u
  std::size_t output_lags = 1;      // n_y
  std::size_t actuation_lags = 1;   // n_u
  std::size_t coupling = 0;         // dimension of w(k); 0 disables coupling
  double horizon = 100.0;           // K used for the phase input k / K
  std::vector<std::size_t> hidden{16};

  std::size_t process_input_width() const {
    return outputs * output_lags + actuations * (actuation_lags + 1) + coupling + 1;
  }
  std::size_t disturbance_input_width() const { return actuations * actuation_lags + 1; }

  // Offsets inside the process-network input vector.
  std::size_t output_lag_offset(std::size_t lag, std::size_t component) const {
    return (lag - 1) * outputs + component;
  }
  std::size_t actuation_lag_offset(std::size_t lag, std::size_t channel) const {
    return outputs * output_lags + lag * actuations + channel;
  }
  std::size_t coupling_offset(std::size_t i) const {
    return outputs * output_lags + actuations * (actuation_lags + 1) + i;
  }
  std::size_t phase_offset() const { return process_input_width() - 1; }

  friend bool operator==(const NarxShape&, const NarxShape&) = default;
};

/// x_normalized = (x - shift) / scale, componentwise.
struct Normalizer {
  std::vector<double> shift;
  std::vector<double> scale;

  static Normalizer identity(std::size_t n);
  static Normalizer fit(const std::vector<std::vector<double>>& rows, std::size_t n);
  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> invert(std::span<const double> x) const;
  friend bool operator==(const Normalizer&, const Normalizer&) = default;
};

/// g(y) = sum_i coefficients[i] * y_i + offset.
struct AffineMap {
  std::vector<double> coefficients;
  double offset = 0.0;
  double operator()(std::span<const double> y) const;
  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

/// Index sets excluded from the model for one criterion, plus the mapping of
/// the retained outputs onto that criterion's effort per service cycle.
struct CriterionSubsets {
  std::vector<std::size_t> excluded_outputs;         // 0-based output components
  std::vector<std::size_t> excluded_output_lags;     // lags 1..n_y
  std::vector<std::size_t> excluded_actuations;      // 0-based channels
  std::vector<std::size_t> excluded_actuation_lags;  // lags 0..n_u
  std::vector<std::size_t> excluded_coupling;        // 0-based components of w
  AffineMap effort_map;
  friend bool operator==(const CriterionSubsets&, const CriterionSubsets&) = default;
};

struct NarxModel {
  std::string id;
  NarxShape shape;
  Mlp process_net;      // f
  Mlp disturbance_net;  // h
  Normalizer process_in, process_out, disturbance_in, disturbance_out;
  bool normalization_fitted = false;
  std::array<CriterionSubsets, 3> criteria;
  /// Physical range of each output; service efforts read clamped outputs.
  std::vector<Interval> output_range;
  /// Most recently observed disturbance window du~(k-1..k-nu).
  std::vector<std::vector<double>> recent_disturbances;
  std::uint64_t seed = 0;
  int version = 0;

  /// Seeded networks, identity normalization, no exclusions.
  static NarxModel create(std::string id, NarxShape shape, std::uint64_t seed);

  /// Throws ReconfigError listing the first violated invariant.
  void check() const;

  friend bool operator==(const NarxModel&, const NarxModel&) = default;
};

/// Sliding windows of the past, zero-padded before start-up. Index 0 of each
/// window is the most recent cycle (k-1).
class ProcessHistory {
public:
  explicit ProcessHistory(const NarxShape& shape);

  const std::vector<std::vector<double>>& outputs() const { return outputs_; }
  const std::vector<std::vector<double>>& actuations() const { return actuations_; }
  const std::vector<std::vector<double>>& disturbances() const { return disturbances_; }
  const std::vector<double>& coupling() const { return coupling_; }

  void set_coupling(std::vector<double> w);
  void set_disturbances(const std::vector<std::vector<double>>& window);
  /// Shifts cycle k into the windows once its values are known.
  void advance(std::span<const double> y, std::span<const double> u,
               std::span<const double> disturbance);

private:
  std::vector<std::vector<double>> outputs_;
  std::vector<std::vector<double>> actuations_;
  std::vector<std::vector<double>> disturbances_;
  std::vector<double> coupling_;
};

struct EffectiveActuation {
  std::vector<double> current;              // u^(k)
  std::vector<std::vector<double>> lagged;  // u~(k-1..k-nu)
};

std::vector<double> estimate_disturbance(const NarxModel& model, const ProcessHistory& history,
                                         long k);

EffectiveActuation effective_actuation(const ProcessHistory& history,
                                       std::span<const double> u_now,
                                       std::span<const double> disturbance_estimate);

/// Raw (un-normalized) input vector of f for cycle k.
std::vector<double> process_input(const NarxModel& model, const ProcessHistory& history,
                                  std::span<const double> u_now, long k);

std::vector<double> predict(const NarxModel& model, const ProcessHistory& history,
                            std::span<const double> u_now, long k);

/// Criterion-restricted predictor: dropped history entries are masked to
/// their normalization centre, dropped outputs are not reported.
class CriterionView {
public:
  CriterionView(const NarxModel& model, Criterion z);

  std::vector<double> predict(const ProcessHistory& history, std::span<const double> u_now,
                              long k) const;
  const std::vector<std::size_t>& retained_outputs() const { return retained_outputs_; }
  const std::vector<bool>& input_mask() const { return keep_input_; }
  Criterion criterion() const { return z_; }

private:
  const NarxModel* model_;
  Criterion z_;
  std::vector<std::size_t> retained_outputs_;
  std::vector<bool> keep_input_;
};

/// Throws ReconfigError when the criterion carries weight but retains no
/// output component.
CriterionView project_criterion(const NarxModel& model, Criterion z, double weight = 1.0);

/// sum_k g(y^z(k)) over a per-cycle trajectory; 0 for an empty trajectory.
double service_effort(const AffineMap& g, const std::vector<std::vector<double>>& trajectory);
double service_effort(const NarxModel& model, Criterion z,
                      const std::vector<std::vector<double>>& trajectory);

// ---------------------------------------------------------------- training

struct TrainingSample {
  std::vector<double> process_input;  // raw
  std::vector<double> process_target;
  std::vector<double> disturbance_input;
  std::vector<double> disturbance_target;
};

/// Teacher-forced samples: true lagged outputs and observed disturbances.
std::vector<TrainingSample> make_samples(const NarxModel& model, const OperatingDataset& data);

/// Mean squared error of f plus mean squared error of h, both in normalized
/// target space.
double loss(const NarxModel& model, std::span<const TrainingSample> batch);

struct NarxGradient {
  std::vector<double> process;
  std::vector<double> disturbance;
};

NarxGradient gradient_of_loss(const NarxModel& model, std::span<const TrainingSample> batch);

struct TrainingOptions {
  double learning_rate = 0.01;
  std::size_t epochs = 200;
  std::size_t batch_size = 16;
  std::uint64_t seed = 1;
};

struct TrainingResult {
  NarxModel model;
  std::vector<double> loss_curve;  // [0] before training, then one per epoch
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

/// Adam on mini-batches. Returns the best parameters seen, so the final
/// training loss never exceeds the initial one. Throws TrainingDiverged on a
/// non-finite loss.
TrainingResult train(const NarxModel& model, const OperatingDataset& data,
                     const TrainingOptions& options);

/// One-step-ahead prediction error in output units, disturbance estimated by
/// h, over records [first, end). Earlier records only feed the history.
double one_step_mse(const NarxModel& model, const OperatingDataset& data, std::size_t first = 0);

}  // namespace reconfig
