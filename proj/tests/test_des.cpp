#include <sstream>

#include "doctest.h"
#include "support.hpp"

using namespace reconfig;
using namespace testing;

namespace {

std::shared_ptr<const NarxModel> constant(double v, std::size_t coupling = 0) {
  return std::make_shared<NarxModel>(constant_model({v}, 1, coupling));
}

const ModuleResult& module_of(const SimulationResult& r, const std::string& id) {
  for (const auto& m : r.modules)
    if (m.module_id == id) return m;
  throw std::runtime_error("no module " + id);
}

}  // namespace

TEST_CASE("standby effort is the per-cycle mapped constant summed over s cycles") {
  CHECK(standby_effort(0.5, ScalarMap{}, 4) == 2.0);
  CHECK(standby_effort(0.5, ScalarMap{}, 0) == 0.0);
  CHECK(standby_effort(0.5, ScalarMap{2.0, 0.0}, 3) == 3.0);
  CHECK(standby_effort(1.0, ScalarMap{1.0, 0.25}, 2) == 2.5);
}

TEST_CASE("one module, lot 3, 2 s cycles: makespan 6 s and no standby") {
  auto plan = desk_plan({{"M1", 2.0}}, constant(1.0));
  auto r = simulate(plan, uniform_parameters(plan, 0.5), 3);
  CHECK(r.makespan == doctest::Approx(6.0));
  CHECK(r.f.time() == doctest::Approx(6.0));
  REQUIRE(r.modules.size() == 1);
  CHECK(r.modules[0].service_cycles == 3);
  CHECK(r.modules[0].standby_cycles == 0);
}

TEST_CASE("two-module flow line, lot 1, 2 s and 3 s: makespan 5 s") {
  auto plan = desk_plan({{"M1", 2.0}, {"M2", 3.0}}, constant(1.0), 1.0);
  auto r = simulate(plan, uniform_parameters(plan, 0.5), 1);
  CHECK(r.makespan == doctest::Approx(5.0));
  CHECK(r.tick == doctest::Approx(1.0));
  const auto& up = module_of(r, "M1");
  CHECK(up.service_time == doctest::Approx(2.0));
  CHECK(up.standby_cycles == 3);
  CHECK(up.standby_time == doctest::Approx(3.0));
  const auto& down = module_of(r, "M2");
  CHECK(down.standby_cycles == 2);
  CHECK(down.service_cycles == 1);
}

TEST_CASE("module energy: 5 J per service cycle, p = 3, 1 J standby, s = 4 gives 19 J") {
  // 1 s upstream, 2 s downstream, lot 3: the upstream module blocks on the
  // occupied buffer and finishes its share of the 7 s makespan in standby.
  auto plan = desk_plan({{"M1", 1.0}, {"M2", 2.0}}, constant(5.0), 1.0);
  auto r = simulate(plan, uniform_parameters(plan, 0.5), 3);
  CHECK(r.makespan == doctest::Approx(7.0));
  const auto& m1 = module_of(r, "M1");
  CHECK(m1.service_cycles == 3);
  CHECK(m1.standby_cycles == 4);
  CHECK(m1.service.energy() == 15.0);
  CHECK(m1.standby.energy() == 4.0);
  CHECK(m1.total.energy() == 19.0);
}

TEST_CASE("system energy and cost are the sum over modules; time is the makespan") {
  auto plan = desk_plan({{"A", 1.5}, {"B", 0.5}, {"C", 2.5}}, constant(2.0), 0.3);
  auto r = simulate(plan, uniform_parameters(plan, 0.5), 4);
  double e = 0, c = 0;
  for (const auto& m : r.modules) {
    e += m.total.energy();
    c += m.total.cost();
    CHECK(m.total == m.service + m.standby);
    CHECK(m.service_time + m.standby_time == doctest::Approx(r.makespan).epsilon(1e-12));
  }
  CHECK(r.f.energy() == e);
  CHECK(r.f.cost() == c);
  CHECK(r.f.time() == r.makespan);
}

TEST_CASE("a module serving two steps reports both") {
  auto plan = desk_plan({{"A", 1.0}, {"B", 1.0}, {"A", 1.0}}, constant(1.0));
  auto r = simulate(plan, uniform_parameters(plan, 0.5), 2);
  CHECK(module_of(r, "A").service_cycles == 4);
  CHECK(module_of(r, "B").service_cycles == 2);
  for (const auto& m : r.modules) CHECK(m.service_time + m.standby_time == doctest::Approx(r.makespan));
}

TEST_CASE("larger lots never shorten the makespan") {
  auto plan = desk_plan({{"A", 1.2}, {"B", 0.8}, {"C", 1.6}}, constant(1.0));
  double last = 0.0;
  for (int lot = 1; lot <= 8; ++lot) {
    const double m = simulate(plan, uniform_parameters(plan, 0.5), lot).makespan;
    CHECK(m >= last);
    last = m;
  }
}

TEST_CASE("each step reads its predecessor's previous-cycle output as coupling") {
  NarxShape s;
  s.coupling = 1;
  s.hidden = {3};
  auto first = std::make_shared<NarxModel>(NarxModel::create("a", s, 3));
  auto second = std::make_shared<NarxModel>(NarxModel::create("b", s, 4));
  auto plan = desk_plan({{"A", 1.0}, {"B", 1.0}}, first);
  plan.steps[1].model = second;
  auto r = simulate(plan, uniform_parameters(plan, 0.6), 5);
  REQUIRE(r.step_couplings[1].size() == 5);
  CHECK(r.step_couplings[1][0] == std::vector<double>{0.0});
  for (std::size_t k = 1; k < 5; ++k) CHECK(r.step_couplings[1][k] == r.step_outputs[0][k - 1]);
  for (const auto& w : r.step_couplings[0]) CHECK(w == std::vector<double>{0.0});
}

TEST_CASE("criterion outputs are clamped to the physical output range") {
  auto m = constant_model({-3.0});
  auto plan = desk_plan({{"A", 1.0}}, std::make_shared<NarxModel>(m));
  auto r = simulate(plan, uniform_parameters(plan, 0.5), 2);
  CHECK(r.f.energy() == 0.0);
}

TEST_CASE("parameters outside the operator bounds are rejected") {
  auto plan = desk_plan({{"A", 1.0}}, constant(1.0));
  CHECK_THROWS_AS(simulate(plan, {{1.5}}, 1), ReconfigError);
  CHECK_THROWS_AS(simulate(plan, {{0.5, 0.5}}, 1), ReconfigError);
  CHECK_THROWS_AS(simulate(plan, {{0.5}}, 0), ReconfigError);
}

TEST_CASE("service durations are rounded to the 0.1 s grid") {
  CHECK(duration_units(2.0) == 20);
  CHECK(duration_units(0.04) == 1);
  CHECK(duration_units(1.26) == 13);
}

TEST_CASE("trace export lists state entries and exits") {
  auto plan = desk_plan({{"M1", 2.0}, {"M2", 3.0}}, constant(1.0));
  auto r = simulate(plan, uniform_parameters(plan, 0.5), 1, {true});
  std::ostringstream os;
  write_trace_csv(os, r);
  const std::string csv = os.str();
  CHECK(csv.rfind("time,module,state,event,cycle\n", 0) == 0);
  CHECK(csv.find("0.0,M1,service,entry,1") != std::string::npos);
  CHECK(csv.find("2.0,M1,standby,entry,1") != std::string::npos);
  CHECK(csv.find("5.0,M1,standby,exit,3") != std::string::npos);
  CHECK(csv.find("5.0,M2,service,exit,1") != std::string::npos);
}
