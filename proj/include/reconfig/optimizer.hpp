#pragma once

// Simulation-based parameter optimization. A system configuration is first
// optimized for each criterion alone; the three optima define per-criterion
// reference ranges, and the weighted normalized sum
//
//   F(U) = sum_z w_z (f_z(U) - f_z,min) / (f_z,max - f_z,min)
//
// is then minimized with the same derivative-free strategy.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "reconfig/model.hpp"

namespace reconfig {

using ScalarObjective = std::function<double(std::span<const double>)>;
using EffortObjective = std::function<EffortVector(std::span<const double>)>;

struct SearchResult {
  std::vector<double> best;
  double best_value = 0.0;
  std::size_t evaluations = 0;
  /// Objective value of every evaluated point, in evaluation order.
  std::vector<double> trace;
};

/// Derivative-free minimizer over a box. Implementations must be
/// deterministic for a given (budget, seed).
class SearchStrategy {
public:
  virtual ~SearchStrategy() = default;
  virtual std::string name() const = 0;
  virtual SearchResult minimize(const ScalarObjective& objective,
                                const std::vector<ParameterBound>& bounds, std::size_t budget,
                                std::uint64_t seed) const = 0;
};

/// Uniform random sampling for 70% of the budget, then coordinate pattern
/// search around the incumbent with step halving.
class RandomPatternSearch final : public SearchStrategy {
public:
  explicit RandomPatternSearch(double sample_fraction = 0.7, double initial_step = 0.25)
      : sample_fraction_(sample_fraction), initial_step_(initial_step) {}
  std::string name() const override { return "random_pattern"; }
  SearchResult minimize(const ScalarObjective& objective, const std::vector<ParameterBound>& bounds,
                        std::size_t budget, std::uint64_t seed) const override;

private:
  double sample_fraction_;
  double initial_step_;
};

/// Exhaustive evaluation of `points` evenly spaced values per parameter
/// (lexicographic order, first minimum wins). Ignores budget and seed.
class GridSearch final : public SearchStrategy {
public:
  explicit GridSearch(std::size_t points) : points_(points) {}
  std::string name() const override { return "grid"; }
  SearchResult minimize(const ScalarObjective& objective, const std::vector<ParameterBound>& bounds,
                        std::size_t budget, std::uint64_t seed) const override;
  std::size_t points() const { return points_; }

  static std::vector<double> axis(const ParameterBound& b, std::size_t points);

private:
  std::size_t points_;
};

struct OptimizerSettings {
  std::string strategy = "random_pattern";
  std::size_t single_budget = 300;
  std::size_t weighted_budget = 600;
  std::size_t grid_points = 5;
  double sample_fraction = 0.7;
  double initial_step = 0.25;
  friend bool operator==(const OptimizerSettings&, const OptimizerSettings&) = default;
};

std::unique_ptr<SearchStrategy> make_strategy(const OptimizerSettings& settings);

struct SingleOutcome {
  Criterion criterion = Criterion::time;
  std::vector<double> parameters;
  EffortVector efforts;  // all criteria at the optimum
  std::size_t evaluations = 0;
  std::uint64_t seed = 0;
};

SingleOutcome optimize_single(const EffortObjective& objective,
                              const std::vector<ParameterBound>& bounds, Criterion z,
                              const SearchStrategy& strategy, std::size_t budget,
                              std::uint64_t seed);

struct NormalizationRanges {
  std::array<double, 3> min{0.0, 0.0, 0.0};
  std::array<double, 3> max{0.0, 0.0, 0.0};
  std::array<bool, 3> degenerate{false, false, false};
  std::vector<std::string> warnings;

  static constexpr double kDegenerateWidth = 1e-9;
};

/// individual[z] holds the effort vector found when optimizing criterion z
/// alone. f_z,min is its own z component; f_z,max is the largest z component
/// among the other two optima, clamped up to f_z,min.
NormalizationRanges normalization_ranges(const std::array<EffortVector, 3>& individual);

/// Degenerate ranges contribute 0; weights are not renormalized.
double weighted_objective(const EffortVector& f, const CriteriaWeights& weights,
                          const NormalizationRanges& ranges);

struct OptimizationOutcome {
  std::vector<double> parameters;  // U*
  double objective = 0.0;          // F(U*)
  EffortVector efforts;            // f_z(U*)
  std::size_t evaluations = 0;
  std::uint64_t seed = 0;
  std::vector<double> trace;       // F of every evaluated point
  std::vector<std::string> warnings;
};

OptimizationOutcome optimize_weighted(const EffortObjective& objective,
                                      const std::vector<ParameterBound>& bounds,
                                      const CriteriaWeights& weights,
                                      const NormalizationRanges& ranges,
                                      const SearchStrategy& strategy, std::size_t budget,
                                      std::uint64_t seed);

}  // namespace reconfig
