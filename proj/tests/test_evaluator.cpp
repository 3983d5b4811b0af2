#include <algorithm>
#include <random>

#include "doctest.h"
#include "reconfig/evaluator.hpp"

using namespace reconfig;

namespace {

SystemConfiguration candidate(const std::string& module, EffortVector production) {
  SystemConfiguration c;
  c.sequence = {{module, "c", "op"}};
  c.layout = {{module, 1}};
  c.production = production;
  return c;
}

}  // namespace

TEST_CASE("total effort is the componentwise sum") {
  CHECK(total_effort({3, 0, 1}, {8, 10, 2}) == EffortVector{11, 10, 3});
  CHECK(total_effort({}, {8, 10, 2}) == EffortVector{8, 10, 2});
  CHECK(total_effort({8, 10, 2}, {3, 0, 1}) == total_effort({3, 0, 1}, {8, 10, 2}));
}

TEST_CASE("evaluation values map best to 1 and worst to 0") {
  auto r = evaluation_values({{10, 10, 10}, {30, 30, 30}, {50, 50, 50}});
  CHECK(r[0] == std::array<double, 3>{1, 1, 1});
  CHECK(r[1] == std::array<double, 3>{0.5, 0.5, 0.5});
  CHECK(r[2] == std::array<double, 3>{0, 0, 0});
  CHECK(evaluation_values({{4, 5, 6}})[0] == std::array<double, 3>{1, 1, 1});
  auto tie = evaluation_values({{5, 1, 1}, {5, 2, 2}});
  CHECK(tie[0][0] == 1.0);
  CHECK(tie[1][0] == 1.0);
}

TEST_CASE("utility is the weighted sum of evaluation values") {
  CHECK(utility({1, 1, 1}, CriteriaWeights(0.2, 0.3, 0.5)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(utility({0, 0, 0}, CriteriaWeights(0.2, 0.3, 0.5)) == 0.0);
  CHECK(utility({1, 0.5, 0}, CriteriaWeights(0.5, 0.3, 0.2)) == doctest::Approx(0.65).epsilon(1e-15));
}

TEST_CASE("selection takes the largest utility") {
  RankedConfigurations rc;
  for (double v : {0.4, 0.9, 0.7}) {
    auto c = candidate("M", {});
    c.utility = v;
    rc.ranked.push_back(c);
  }
  std::stable_sort(rc.ranked.begin(), rc.ranked.end(), ranks_before);
  CHECK(select(rc).utility == 0.9);
}

TEST_CASE("utility ties go to the shorter total time") {
  auto a = candidate("A", {});
  auto b = candidate("B", {});
  a.utility = b.utility = 0.8;
  a.total = {12, 0, 0};
  b.total = {10, 0, 0};
  CHECK(ranks_before(b, a));
  CHECK_FALSE(ranks_before(a, b));
  a.total = b.total;
  CHECK(ranks_before(a, b));
}

TEST_CASE("rank fills totals, evaluation values and utilities") {
  std::vector<SystemConfiguration> cands{candidate("A", {10, 10, 10}), candidate("B", {30, 20, 10}),
                                         candidate("C", {50, 30, 10})};
  cands[1].reconfiguration = {0, 0, 5};
  auto rc = rank(cands, CriteriaWeights(0.5, 0.3, 0.2));
  REQUIRE(rc.ranked.size() == 3);
  CHECK(select(rc).sequence[0].module_id == "A");
  CHECK(rc.ranked[0].utility == doctest::Approx(1.0));
  const auto& b = rc.ranked[1];
  CHECK(b.total == EffortVector{30, 20, 15});
  CHECK(b.evaluation[2] == 0.0);
  CHECK(b.utility == doctest::Approx(0.5 * 0.5 + 0.3 * 0.5));
  CHECK_THROWS_AS(rank({}, CriteriaWeights()), ReconfigError);
}

TEST_CASE("a single candidate is selected") {
  auto rc = rank({candidate("A", {1, 2, 3})}, CriteriaWeights());
  CHECK(rc.ranked.size() == 1);
  CHECK(select(rc).utility == doctest::Approx(1.0));
}

TEST_CASE("selection ignores candidate order and positive-affine rescaling") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(0, 100);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<SystemConfiguration> cands;
    for (int i = 0; i < 6; ++i) cands.push_back(candidate("M" + std::to_string(i), {d(rng), d(rng), d(rng)}));
    CriteriaWeights w(0.2, 0.5, 0.3);
    const auto base = select(rank(cands, w)).sequence;
    auto shuffled = cands;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(select(rank(shuffled, w)).sequence == base);
    auto scaled = cands;
    for (auto& c : scaled) c.production[Criterion::energy] = 4.0 * c.production.energy() + 17.0;
    CHECK(select(rank(scaled, w)).sequence == base);
  }
}
