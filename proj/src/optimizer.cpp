#include "reconfig/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace reconfig {

namespace {

class Tracker {
public:
  explicit Tracker(const ScalarObjective& f) : f_(f) {}

  double operator()(const std::vector<double>& x) {
    const double v = f_(x);
    result_.trace.push_back(v);
    ++result_.evaluations;
    if (result_.best.empty() || v < result_.best_value) {
      result_.best = x;
      result_.best_value = v;
    }
    return v;
  }

  std::size_t evaluations() const { return result_.evaluations; }
  const std::vector<double>& best() const { return result_.best; }
  double best_value() const { return result_.best_value; }
  SearchResult take() { return std::move(result_); }

private:
  const ScalarObjective& f_;
  SearchResult result_;
};

}  // namespace

SearchResult RandomPatternSearch::minimize(const ScalarObjective& objective,
                                           const std::vector<ParameterBound>& bounds,
                                           std::size_t budget, std::uint64_t seed) const {
  if (budget < 1) throw ReconfigError("search budget must be >= 1");
  const std::size_t dim = bounds.size();
  Tracker eval(objective);

  const std::size_t samples =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(sample_fraction_ * static_cast<double>(budget))));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t s = 0; s < samples && eval.evaluations() < budget; ++s) {
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < dim; ++i) x[i] = bounds[i].lo + (bounds[i].hi - bounds[i].lo) * unit(rng);
    eval(x);
  }

  std::vector<double> step(dim);
  double widest = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    step[i] = initial_step_ * (bounds[i].hi - bounds[i].lo);
    widest = std::max(widest, bounds[i].hi - bounds[i].lo);
  }
  const double min_step = 1e-9 * std::max(widest, 1.0);

  while (eval.evaluations() < budget && dim > 0) {
    bool improved = false;
    for (std::size_t i = 0; i < dim && eval.evaluations() < budget; ++i) {
      if (step[i] <= 0.0) continue;
      for (double dir : {1.0, -1.0}) {
        if (eval.evaluations() >= budget) break;
        std::vector<double> x = eval.best();
        const double moved = std::clamp(x[i] + dir * step[i], bounds[i].lo, bounds[i].hi);
        if (moved == x[i]) continue;
        const double before = eval.best_value();
        x[i] = moved;
        if (eval(x) < before) {
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      double largest = 0.0;
      for (auto& s : step) {
        s *= 0.5;
        largest = std::max(largest, s);
      }
      if (largest < min_step) break;
    }
  }
  return eval.take();
}

std::vector<double> GridSearch::axis(const ParameterBound& b, std::size_t points) {
  std::vector<double> out;
  if (points <= 1 || b.hi == b.lo) {
    out.push_back(b.lo);
    return out;
  }
  for (std::size_t i = 0; i < points; ++i) {
    // Endpoints exactly on the bounds.
    if (i + 1 == points)
      out.push_back(b.hi);
    else
      out.push_back(b.lo + (b.hi - b.lo) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  return out;
}

SearchResult GridSearch::minimize(const ScalarObjective& objective,
                                  const std::vector<ParameterBound>& bounds, std::size_t,
                                  std::uint64_t) const {
  Tracker eval(objective);
  std::vector<std::vector<double>> axes;
  for (const auto& b : bounds) axes.push_back(axis(b, points_));
  std::vector<std::size_t> idx(bounds.size(), 0);
  std::vector<double> x(bounds.size());
  while (true) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = axes[i][idx[i]];
    eval(x);
    // Odometer increment, last coordinate fastest.
    std::size_t d = idx.size();
    while (d > 0) {
      --d;
      if (++idx[d] < axes[d].size()) break;
      idx[d] = 0;
      if (d == 0) return eval.take();
    }
    if (idx.empty()) return eval.take();
  }
}

std::unique_ptr<SearchStrategy> make_strategy(const OptimizerSettings& settings) {
  if (settings.strategy == "random_pattern")
    return std::make_unique<RandomPatternSearch>(settings.sample_fraction, settings.initial_step);
  if (settings.strategy == "grid") return std::make_unique<GridSearch>(settings.grid_points);
  throw ReconfigError("unknown optimizer strategy '" + settings.strategy + "'");
}

SingleOutcome optimize_single(const EffortObjective& objective,
                              const std::vector<ParameterBound>& bounds, Criterion z,
                              const SearchStrategy& strategy, std::size_t budget,
                              std::uint64_t seed) {
  ScalarObjective scalar = [&](std::span<const double> u) { return objective(u)[z]; };
  auto r = strategy.minimize(scalar, bounds, budget, seed);
  SingleOutcome out;
  out.criterion = z;
  out.parameters = r.best;
  out.efforts = objective(r.best);
  out.evaluations = r.evaluations;
  out.seed = seed;
  return out;
}

NormalizationRanges normalization_ranges(const std::array<EffortVector, 3>& individual) {
  NormalizationRanges out;
  for (Criterion z : kCriteria) {
    const std::size_t i = index_of(z);
    out.min[i] = individual[i][z];
    double mx = -std::numeric_limits<double>::infinity();
    for (Criterion other : kCriteria)
      if (other != z) mx = std::max(mx, individual[index_of(other)][z]);
    if (mx < out.min[i]) {
      out.warnings.push_back(std::string(to_string(z)) +
                             ": cross-optimum values below own optimum; range clamped");
      mx = out.min[i];
    }
    out.max[i] = mx;
    if (out.max[i] - out.min[i] < NormalizationRanges::kDegenerateWidth) {
      out.degenerate[i] = true;
      out.warnings.push_back(std::string(to_string(z)) + ": degenerate normalization range");
    }
  }
  return out;
}

double weighted_objective(const EffortVector& f, const CriteriaWeights& weights,
                          const NormalizationRanges& ranges) {
  double total = 0.0;
  for (Criterion z : kCriteria) {
    const std::size_t i = index_of(z);
    if (ranges.degenerate[i]) continue;
    total += weights[z] * (f[z] - ranges.min[i]) / (ranges.max[i] - ranges.min[i]);
  }
  return total;
}

OptimizationOutcome optimize_weighted(const EffortObjective& objective,
                                      const std::vector<ParameterBound>& bounds,
                                      const CriteriaWeights& weights,
                                      const NormalizationRanges& ranges,
                                      const SearchStrategy& strategy, std::size_t budget,
                                      std::uint64_t seed) {
  ScalarObjective scalar = [&](std::span<const double> u) {
    return weighted_objective(objective(u), weights, ranges);
  };
  auto r = strategy.minimize(scalar, bounds, budget, seed);
  OptimizationOutcome out;
  out.parameters = r.best;
  out.objective = r.best_value;
  out.efforts = objective(r.best);
  out.evaluations = r.evaluations;
  out.seed = seed;
  out.trace = std::move(r.trace);
  out.warnings = ranges.warnings;
  return out;
}

}  // namespace reconfig
