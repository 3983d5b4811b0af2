#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "reconfig/scenario.hpp"
#include "support.hpp"

using namespace reconfig;
using nlohmann::json;

namespace {

json demo() {
  std::ifstream f(RECONFIG_DATA_DIR "/demo_scenario.json");
  return json::parse(f);
}

bool has_issue(const ValidationReport& r, const std::string& path, const std::string& fragment = "") {
  for (const auto& i : r.issues)
    if (!i.warning && i.path == path && i.message.find(fragment) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("the bundled demo scenario validates") {
  auto loaded = scenario_from_json(demo());
  INFO(loaded.report.to_string());
  REQUIRE(loaded.scenario.has_value());
  CHECK(loaded.scenario->system.modules.size() == 3);
  CHECK(loaded.scenario->system.layout.locations.size() == 4);
}

TEST_CASE("weights 0.5/0.3/0.2 are accepted, 0.5/0.5/0.5 rejected") {
  auto doc = demo();
  doc["order"]["weights"] = {{"time", 0.5}, {"energy", 0.3}, {"cost", 0.2}};
  CHECK(scenario_from_json(doc).scenario.has_value());
  doc["order"]["weights"] = {{"time", 0.5}, {"energy", 0.5}, {"cost", 0.5}};
  auto loaded = scenario_from_json(doc);
  CHECK_FALSE(loaded.scenario.has_value());
  CHECK(has_issue(loaded.report, "order.weights", "weights sum != 1"));
}

TEST_CASE("an operator naming a missing process model is reported with its element path") {
  auto doc = demo();
  doc["modules"][1]["configurations"][0]["operators"][0]["model"] = "nope";
  auto loaded = scenario_from_json(doc);
  CHECK_FALSE(loaded.scenario.has_value());
  CHECK(has_issue(loaded.report, "modules[1].configurations[0].operators[0].model", "nope"));
}

TEST_CASE("unknown keys are errors unless lenient") {
  auto doc = demo();
  doc["order"]["colour"] = "red";
  auto strict = scenario_from_json(doc);
  CHECK_FALSE(strict.scenario.has_value());
  CHECK(has_issue(strict.report, "order.colour", "unknown key"));
  auto lenient = scenario_from_json(doc, true);
  CHECK(lenient.scenario.has_value());
  CHECK(lenient.report.issues.size() == 1);
  CHECK(lenient.report.issues[0].warning);
}

TEST_CASE("every violation is listed, not just the first") {
  auto doc = demo();
  doc["order"]["lot_size"] = 0;
  doc["modules"][0]["current_configuration"] = "missing";
  doc["layout"]["edges"][0]["effort"]["time"] = -1;
  auto loaded = scenario_from_json(doc);
  CHECK_FALSE(loaded.scenario.has_value());
  CHECK(has_issue(loaded.report, "order.lot_size"));
  CHECK(has_issue(loaded.report, "modules[0].current_configuration"));
  CHECK(has_issue(loaded.report, "layout.edges[0].effort"));
}

TEST_CASE("malformed intervals and missing keys are rejected") {
  auto doc = demo();
  doc["order"]["output"]["gloss"] = json::array({2, 1});
  CHECK_FALSE(scenario_from_json(doc).scenario.has_value());
  auto doc2 = demo();
  doc2.erase("layout");
  auto loaded = scenario_from_json(doc2);
  CHECK_FALSE(loaded.scenario.has_value());
  CHECK(has_issue(loaded.report, "layout", "missing"));
}

TEST_CASE("a negative effort map is rejected at load time") {
  auto doc = demo();
  doc["process_models"][0]["criteria"]["energy"]["effort_map"]["coefficients"] = {-1.0};
  auto loaded = scenario_from_json(doc);
  CHECK_FALSE(loaded.scenario.has_value());
}

TEST_CASE("ids may not contain the model-key separator") {
  auto doc = demo();
  doc["modules"][0]["id"] = "M__1";
  CHECK_FALSE(scenario_from_json(doc).scenario.has_value());
}

TEST_CASE("validation is idempotent and the file round trip is exact") {
  auto loaded = scenario_from_json(demo());
  REQUIRE(loaded.scenario.has_value());
  const auto& sc = *loaded.scenario;
  CHECK(validate_scenario(sc).issues.empty());
  CHECK(validate_scenario(sc).issues.empty());

  auto dir = testing::temp_dir("scenario-roundtrip");
  save_scenario(dir / "a.json", sc);
  auto again = load_scenario(dir / "a.json");
  REQUIRE(again.scenario.has_value());
  CHECK(*again.scenario == sc);
  save_scenario(dir / "b.json", *again.scenario);
  CHECK(testing::read_file(dir / "a.json") == testing::read_file(dir / "b.json"));
}

TEST_CASE("model JSON round trip preserves every field") {
  auto loaded = scenario_from_json(demo());
  REQUIRE(loaded.scenario.has_value());
  const auto& spec = loaded.scenario->process_models.front();
  NarxModel m = instantiate_model(spec, "M1__std__drill", 99);
  m.version = 3;
  m.recent_disturbances = {{0.25}};
  NarxModel back = model_from_json(model_to_json(m));
  CHECK(back == m);
}
