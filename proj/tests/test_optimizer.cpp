#include <cmath>

#include "doctest.h"
#include "reconfig/optimizer.hpp"

using namespace reconfig;

namespace {

const std::vector<ParameterBound> unit1{{"u", 0.0, 1.0}};

std::array<EffortVector, 3> worked_example() {
  return {EffortVector{10, 50, 8}, EffortVector{12, 40, 9}, EffortVector{15, 55, 6}};
}

// Competing criteria on a 2-d box: time falls, energy rises with u0; cost is
// a bowl around (0.3, 0.7).
EffortVector tradeoff(std::span<const double> u) {
  return {10.0 - 4.0 * u[0] + u[1], 5.0 + 6.0 * u[0] * u[0], 1.0 + std::pow(u[0] - 0.3, 2) + std::pow(u[1] - 0.7, 2)};
}

const std::vector<ParameterBound> box2{{"a", 0.0, 1.0}, {"b", 0.0, 1.0}};

}  // namespace

TEST_CASE("an increasing affine cost is minimized at the lower bound") {
  RandomPatternSearch rps;
  auto out = optimize_single([](std::span<const double> u) { return EffortVector{1, 1, 2.0 + 3.0 * u[0]}; },
                             unit1, Criterion::cost, rps, 100, 7);
  REQUIRE(out.parameters.size() == 1);
  CHECK(out.parameters[0] < 1e-6);
  CHECK(out.efforts.cost() == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("budget 1 returns the single sampled point") {
  RandomPatternSearch rps;
  auto r = rps.minimize([](std::span<const double> u) { return u[0]; }, unit1, 1, 3);
  CHECK(r.evaluations == 1);
  REQUIRE(r.trace.size() == 1);
  CHECK(r.best_value == r.trace[0]);
  CHECK(r.best[0] == r.trace[0]);
  CHECK_THROWS_AS(rps.minimize([](std::span<const double>) { return 0.0; }, unit1, 0, 3), ReconfigError);
}

TEST_CASE("same seed and budget reproduce the outcome; the budget is respected") {
  RandomPatternSearch rps;
  auto f = [](std::span<const double> u) { return tradeoff(u).cost(); };
  auto a = rps.minimize(f, box2, 80, 11);
  auto b = rps.minimize(f, box2, 80, 11);
  CHECK(a.best == b.best);
  CHECK(a.trace == b.trace);
  CHECK(a.evaluations <= 80);
  CHECK(a.trace.size() == a.evaluations);
  auto c = rps.minimize(f, box2, 80, 12);
  CHECK_FALSE(c.trace == a.trace);
}

TEST_CASE("the incumbent is no worse than any evaluated point and stays in bounds") {
  RandomPatternSearch rps;
  auto f = [](std::span<const double> u) { return tradeoff(u).cost(); };
  auto r = rps.minimize(f, box2, 120, 5);
  for (double v : r.trace) CHECK(r.best_value <= v);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(r.best[i] >= 0.0);
    CHECK(r.best[i] <= 1.0);
  }
  CHECK(r.best[0] == doctest::Approx(0.3).epsilon(0.02));
  CHECK(r.best[1] == doctest::Approx(0.7).epsilon(0.02));
}

TEST_CASE("grid axes and lexicographic first-minimum search") {
  CHECK(GridSearch::axis({"u", 0.0, 1.0}, 5) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(GridSearch::axis({"u", 2.0, 2.0}, 5) == std::vector<double>{2.0});
  CHECK(GridSearch::axis({"u", 0.2, 1.0}, 1) == std::vector<double>{0.2});
  GridSearch grid(3);
  std::vector<std::vector<double>> seen;
  auto r = grid.minimize(
      [&](std::span<const double> u) {
        seen.emplace_back(u.begin(), u.end());
        return 0.0;
      },
      box2, 1, 0);
  REQUIRE(seen.size() == 9);
  CHECK(seen[1] == std::vector<double>{0.0, 0.5});
  CHECK(seen[3] == std::vector<double>{0.5, 0.0});
  CHECK(r.best == std::vector<double>{0.0, 0.0});
}

TEST_CASE("normalization ranges of the worked example") {
  auto n = normalization_ranges(worked_example());
  CHECK(n.min == std::array<double, 3>{10, 40, 6});
  CHECK(n.max == std::array<double, 3>{15, 55, 9});
  CHECK(n.degenerate == std::array<bool, 3>{false, false, false});
  CHECK(n.warnings.empty());
}

TEST_CASE("identical optima make every range degenerate and contribute nothing") {
  EffortVector e{3, 4, 5};
  auto n = normalization_ranges({e, e, e});
  CHECK(n.degenerate == std::array<bool, 3>{true, true, true});
  CHECK(n.min == n.max);
  CHECK_FALSE(n.warnings.empty());
  CHECK(weighted_objective(EffortVector{100, 100, 100}, CriteriaWeights(0.2, 0.3, 0.5), n) == 0.0);
}

TEST_CASE("a maximum below the minimum is clamped up to it") {
  // The energy optimum reports lower time than the time optimum itself.
  auto n = normalization_ranges({EffortVector{10, 50, 8}, EffortVector{9, 40, 7}, EffortVector{8, 45, 6}});
  CHECK(n.min[0] == 10);
  CHECK(n.max[0] == 10);
  CHECK(n.degenerate[0]);
  CHECK(n.max[2] == 8);
}

TEST_CASE("F is 0 at every minimum and 1 at every maximum") {
  auto n = normalization_ranges(worked_example());
  CriteriaWeights w(0.5, 0.3, 0.2);
  CHECK(weighted_objective(EffortVector{10, 40, 6}, w, n) == 0.0);
  CHECK(weighted_objective(EffortVector{15, 55, 9}, w, n) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(weighted_objective(EffortVector{12.5, 40, 6}, w, n) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("weights (1, 0, 0) reproduce the time optimum with F = 0") {
  for (const std::string strategy : {"random_pattern", "grid"}) {
    OptimizerSettings s;
    s.strategy = strategy;
    auto strat = make_strategy(s);
    std::array<EffortVector, 3> ind;
    std::vector<double> time_u;
    for (Criterion z : kCriteria) {
      auto o = optimize_single(tradeoff, box2, z, *strat, 150, 21);
      ind[index_of(z)] = o.efforts;
      if (z == Criterion::time) time_u = o.parameters;
    }
    auto ranges = normalization_ranges(ind);
    auto w = optimize_weighted(tradeoff, box2, CriteriaWeights(1, 0, 0), ranges, *strat, 150, 21);
    CHECK(w.parameters == time_u);
    CHECK(w.objective == 0.0);
  }
}

TEST_CASE("weighted optimum is invariant to scaling one criterion") {
  GridSearch grid(5);
  auto scaled = [](std::span<const double> u) {
    auto e = tradeoff(u);
    e[Criterion::energy] = 7.0 * e.energy() + 3.0;
    return e;
  };
  auto solve = [&](const EffortObjective& f) {
    std::array<EffortVector, 3> ind;
    for (Criterion z : kCriteria) ind[index_of(z)] = optimize_single(f, box2, z, grid, 1, 0).efforts;
    return optimize_weighted(f, box2, CriteriaWeights(0.4, 0.3, 0.3), normalization_ranges(ind), grid, 1, 0);
  };
  auto a = solve(tradeoff), b = solve(scaled);
  CHECK(a.parameters == b.parameters);
  CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-12));
}

TEST_CASE("unknown strategy names are rejected") {
  OptimizerSettings s;
  s.strategy = "annealing";
  CHECK_THROWS_AS(make_strategy(s), ReconfigError);
}
