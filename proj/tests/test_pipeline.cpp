#include <atomic>
#include <filesystem>

#include "doctest.h"
#include "reconfig/pipeline.hpp"
#include "support.hpp"

using namespace reconfig;
namespace fs = std::filesystem;

namespace {

Scenario demo(const char* name = "demo_scenario.json") {
  auto loaded = load_scenario(fs::path(RECONFIG_DATA_DIR) / name);
  REQUIRE(loaded.scenario.has_value());
  return *loaded.scenario;
}

// Cheaper settings so the suite stays quick; the demo itself is untouched.
Scenario quick_demo() {
  auto sc = demo();
  sc.training.epochs = 20;
  sc.training.bootstrap_cycles = 60;
  sc.optimizer.single_budget = 15;
  sc.optimizer.weighted_budget = 25;
  return sc;
}

}  // namespace

TEST_CASE("derived seeds are stable and name-sensitive") {
  CHECK(derive_seed(42, "a") == derive_seed(42, "a"));
  CHECK(derive_seed(42, "a") != derive_seed(42, "b"));
  CHECK(derive_seed(42, "a") != derive_seed(43, "a"));
}

TEST_CASE("model keys round trip") {
  ProductionStep s{"M1", "std", "drill"};
  CHECK(model_key(s) == "M1__std__drill");
  CHECK(parse_model_key("M1__std__drill") == s);
  CHECK_FALSE(parse_model_key("M1__std").has_value());
  CHECK_FALSE(parse_model_key("a__b__c__d").has_value());
}

TEST_CASE("parallel_for visits every index once and rethrows failures") {
  std::vector<std::atomic<int>> hits(50);
  parallel_for(50, 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw ReconfigError("boom");
                               }),
                  ReconfigError);
}

TEST_CASE("model store persists models, versions and provenance") {
  auto dir = testing::temp_dir("store");
  NarxModel m = testing::constant_model({1.0});
  m.id = "A__c__op";
  m.version = 2;
  {
    ModelStore store(dir);
    CHECK(store.store_version() == 0);
    store.put(m, "unit test");
    store.bump_store_version();
  }
  ModelStore again(dir);
  CHECK(again.store_version() == 1);
  REQUIRE(again.contains("A__c__op"));
  CHECK(again.entries().at("A__c__op").version == 2);
  CHECK(again.entries().at("A__c__op").provenance == "unit test");
  CHECK(again.load("A__c__op") == m);
  CHECK_THROWS_AS(again.load("B__c__op"), ReconfigError);
}

TEST_CASE("adapting with no datasets leaves the store untouched") {
  auto sc = quick_demo();
  auto dir = testing::temp_dir("adapt-empty");
  ModelStore store(dir);
  auto report = adapt_models(sc, store, {}, 1);
  CHECK_FALSE(report.updated());
  CHECK(report.to_json()["summary"] == "no updates");
  CHECK(report.store_version == 0);
  CHECK(fs::is_empty(dir));
}

TEST_CASE("adapting on anomaly data lowers held-out error and bumps versions by one") {
  auto sc = quick_demo();
  sc.training.epochs = 60;
  auto dir = testing::temp_dir("adapt");
  auto data_dir = testing::temp_dir("adapt-data");
  ModelStore store(dir);
  ensure_models(sc, store, sc.seed);
  const ProductionStep step{"M1", "std", "drill"};
  const int before = store.entries().at(model_key(step)).version;
  CHECK(before == 1);
  const auto csv = data_dir / (model_key(step) + ".csv");
  save_csv(csv, generate_operating_data(sc, step, 200, true, 5));

  auto report = adapt_models(sc, store, {csv, data_dir / "nonsense.csv"}, sc.seed);
  REQUIRE(report.entries.size() == 2);
  const auto& e = report.entries[0];
  CHECK(e.status == "updated");
  CHECK(e.train_samples == 150);
  CHECK(e.held_out_samples == 50);
  CHECK(e.post_mse < e.pre_mse);
  CHECK(e.version == before + 1);
  CHECK(report.entries[1].status == "rejected");
  CHECK(report.store_version == 1);

  ModelStore reopened(dir);
  CHECK(reopened.entries().at(model_key(step)).version == before + 1);
  CHECK(reopened.load(model_key(step)).recent_disturbances.size() == 1);
}

TEST_CASE("no demand stops after identification") {
  auto loaded = load_scenario(fs::path(RECONFIG_DATA_DIR) / "demo_no_demand.json");
  REQUIRE(loaded.scenario.has_value());
  auto res = run_pipeline(*loaded.scenario, {}, {1, 1});
  CHECK(res.status == RunStatus::no_demand);
  CHECK(res.stages == std::vector<std::string>{"identify_demand"});
  CHECK_FALSE(res.current_sequences.empty());
  CHECK(res.ranking.ranked.empty());
}

TEST_CASE("the demo with demand ranks candidates and selects one; jobs do not change the result") {
  auto sc = quick_demo();
  auto dir = testing::temp_dir("pipeline");
  ModelStore store(dir);
  auto models = ensure_models(sc, store, sc.seed);
  auto res = run_pipeline(sc, models, {sc.seed, 1});
  REQUIRE(res.status == RunStatus::selected);
  CHECK(res.stages.back() == "select");
  CHECK_FALSE(res.ranking.ranked.empty());
  for (std::size_t i = 1; i < res.ranking.ranked.size(); ++i)
    CHECK_FALSE(ranks_before(res.ranking.ranked[i], res.ranking.ranked[i - 1]));
  for (const auto& c : res.ranking.ranked) {
    CHECK(c.total == c.reconfiguration + c.production);
    CHECK(c.utility >= 0.0);
    CHECK(c.utility <= 1.0 + 1e-12);
  }

  auto parallel = run_pipeline(sc, models, {sc.seed, 3});
  CHECK(report_json(sc, parallel, {sc.seed, 3}) == report_json(sc, res, {sc.seed, 1}));
}

TEST_CASE("no placeable layout means no feasible configuration") {
  auto sc = quick_demo();
  sc.system.layout.edges.clear();
  auto dir = testing::temp_dir("infeasible");
  ModelStore store(dir);
  auto models = ensure_models(sc, store, sc.seed);
  auto res = run_pipeline(sc, models, {sc.seed, 1});
  CHECK(res.status == RunStatus::no_feasible);
}

TEST_CASE("run_command writes reports and maps outcomes to exit codes") {
  auto out = testing::temp_dir("run-out");
  auto models = testing::temp_dir("run-models");
  auto sc_file = out / "quick.json";
  save_scenario(sc_file, quick_demo());
  RunManifest m;
  m.scenario = sc_file;
  m.models = models;
  m.out = out / "a";
  m.deterministic = true;
  m.trace = true;
  CHECK(run_command(m, {}) == exit_code::ok);
  CHECK(fs::exists(m.out / "report.json"));
  CHECK(fs::exists(m.out / "report.txt"));
  CHECK(fs::exists(m.out / "selected.json"));
  CHECK(fs::exists(m.out / "trace" / "rank_1.csv"));
  const auto report = nlohmann::json::parse(testing::read_file(m.out / "report.json"));
  CHECK(report["status"] == "reconfiguration-selected");
  CHECK_FALSE(report.contains("generated_at"));

  m.scenario = out / "missing.json";
  CHECK(run_command(m, {}) == exit_code::validation);
}
