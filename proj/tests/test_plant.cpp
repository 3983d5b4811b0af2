#include <sstream>

#include "doctest.h"
#include "support.hpp"

using namespace reconfig;
using namespace testing;

TEST_CASE("without a disturbance profile every realized disturbance is zero") {
  auto spec = linear_plant(0.5, 1.0, 0.0);
  PlantState st(spec);
  for (long k = 1; k <= 20; ++k) CHECK(step_plant(spec, st, {0.5}, {}, k).disturbance[0] == 0.0);
}

TEST_CASE("step profile switches on at its onset") {
  DisturbanceProfile p{DisturbanceKind::step, 0.3, 5, 10.0, {}};
  auto spec = linear_plant(0.5, 1.0, 0.0, p);
  PlantState st(spec);
  for (long k = 1; k <= 12; ++k) {
    const double d = step_plant(spec, st, {1.0}, {}, k).disturbance[0];
    CHECK(d == (k < 5 ? 0.0 : 0.3));
  }
}

TEST_CASE("drift and periodic profiles") {
  DisturbanceProfile drift{DisturbanceKind::drift, 0.1, 3, 10.0, {}};
  CHECK(disturbance_at(drift, 2) == 0.0);
  CHECK(disturbance_at(drift, 3) == doctest::Approx(0.1));
  CHECK(disturbance_at(drift, 5) == doctest::Approx(0.3));
  DisturbanceProfile wave{DisturbanceKind::periodic, 2.0, 1, 4.0, {}};
  CHECK(disturbance_at(wave, 1) == doctest::Approx(0.0));
  CHECK(disturbance_at(wave, 2) == doctest::Approx(2.0));
  CHECK(disturbance_at(wave, 4) == doctest::Approx(-2.0));
}

TEST_CASE("disturbances hit only the listed channels") {
  PlantSpec spec;
  spec.dynamics.outputs = 1;
  spec.dynamics.actuations = 2;
  spec.dynamics.bias = {0.0};
  spec.dynamics.input = {{{1.0, 1.0}}};
  spec.disturbance = {DisturbanceKind::step, 0.5, 1, 10.0, {1}};
  PlantState st(spec);
  auto out = step_plant(spec, st, {1.0, 1.0}, {}, 1);
  CHECK(out.disturbance == std::vector<double>{0.0, 0.5});
  CHECK(out.y[0] == 2.5);
}

TEST_CASE("linear recursion y(k) = 0.5 y(k-1) + u(k)") {
  auto spec = linear_plant(0.5, 1.0, 0.0);
  PlantState st(spec);
  const std::vector<double> want{1.0, 1.5, 1.75, 1.875, 1.9375};
  for (long k = 1; k <= 5; ++k) CHECK(step_plant(spec, st, {1.0}, {}, k).y[0] == want[k - 1]);
}

TEST_CASE("coupling and quadratic terms") {
  PlantSpec spec;
  spec.dynamics.outputs = 1;
  spec.dynamics.actuations = 1;
  spec.dynamics.coupling_dim = 1;
  spec.dynamics.bias = {1.0};
  spec.dynamics.input = {{{2.0}}};
  spec.dynamics.coupling = {{0.5}};
  spec.dynamics.quadratic = {{3.0}};
  PlantState st(spec);
  CHECK(step_plant(spec, st, {2.0}, {4.0}, 1).y[0] == 1.0 + 4.0 + 2.0 + 12.0);
}

TEST_CASE("dataset generation: zero cycles rejected, seeds reproduce") {
  auto spec = linear_plant(0.5, 1.0, 0.2, {DisturbanceKind::step, 0.3, 5, 10.0, {}}, 0.05, 3);
  Excitation ex{{{"u", 0.0, 1.0}}, 0.0, 1.0};
  CHECK_THROWS_AS(generate_dataset(spec, ex, 0, 1), ReconfigError);
  auto a = generate_dataset(spec, ex, 50, 9);
  auto b = generate_dataset(spec, ex, 50, 9);
  CHECK(a == b);
  CHECK_FALSE(a == generate_dataset(spec, ex, 50, 10));
  for (const auto& r : a.records) CHECK(r.disturbance[0] == disturbance_at(spec.disturbance, r.k));
  CHECK_NOTHROW(a.check());
}

TEST_CASE("replaying a noise-free dataset through the dynamics reproduces its outputs") {
  auto spec = linear_plant(0.6, 0.9, -0.4, {DisturbanceKind::drift, 0.01, 10, 10.0, {}});
  spec.dynamics.quadratic = {{0.2}};
  Excitation ex{{{"u", 0.2, 1.0}}, 0.0, 1.0};
  auto data = generate_dataset(spec, ex, 100, 4);
  double y1 = 0.0, u1 = 0.0;
  for (const auto& r : data.records) {
    const double eff = r.u[0] + r.disturbance[0];
    const double y = 0.6 * y1 + 0.9 * eff - 0.4 * u1 + 0.2 * eff * eff;
    CHECK(r.y[0] == doctest::Approx(y).epsilon(1e-14));
    y1 = r.y[0];
    u1 = eff;
  }
}

TEST_CASE("CSV round trip keeps the header contract") {
  auto spec = linear_plant(0.5, 1.0, 0.0);
  Excitation ex{{{"u", 0.0, 1.0}}, 0.0, 1.0};
  auto data = generate_dataset(spec, ex, 5, 2);
  std::stringstream ss;
  write_csv(ss, data);
  const std::string text = ss.str();
  CHECK(text.rfind("k,u1,du1,y1\n", 0) == 0);
  auto back = read_csv(ss);
  CHECK(back == data);
}

TEST_CASE("malformed datasets are rejected") {
  OperatingDataset d{1, 1, 0, {{2, {0}, {0}, {}, {1}}, {1, {0}, {0}, {}, {1}}}};
  CHECK_THROWS_AS(d.check(), ReconfigError);
  std::stringstream bad("k,u1,du1,y1\n1,0.5,0\n");
  CHECK_THROWS_AS(read_csv(bad), ReconfigError);
}
