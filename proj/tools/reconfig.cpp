#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "reconfig/pipeline.hpp"

using namespace reconfig;
namespace fs = std::filesystem;

namespace {

void print_issues(const ValidationReport& report) {
  std::cerr << report.to_string();
}

int cmd_validate(const fs::path& scenario, bool lenient) {
  auto loaded = load_scenario(scenario, lenient);
  print_issues(loaded.report);
  if (!loaded.scenario) return exit_code::validation;
  std::cout << "scenario ok: " << loaded.scenario->system.modules.size() << " modules, "
            << all_steps(loaded.scenario->system).size() << " operators\n";
  return exit_code::ok;
}

int cmd_adapt(const fs::path& scenario, const fs::path& models, const std::vector<fs::path>& data,
              std::optional<std::uint64_t> seed, const fs::path& out, bool lenient) {
  auto loaded = load_scenario(scenario, lenient);
  print_issues(loaded.report);
  if (!loaded.scenario) return exit_code::validation;
  try {
    ModelStore store(models);
    auto report = adapt_models(*loaded.scenario, store, data, seed.value_or(loaded.scenario->seed),
                               [](const std::string& s) { std::cerr << s << "\n"; });
    const std::string text = report.to_json().dump(2) + "\n";
    if (out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out);
      if (!f) throw ReconfigError("cannot write " + out.string());
      f << text;
    }
    return exit_code::ok;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return exit_code::internal;
  }
}

int cmd_generate(const fs::path& scenario, const std::vector<std::string>& keys, std::size_t cycles,
                 std::optional<std::uint64_t> seed, bool anomaly, const fs::path& out, bool lenient) {
  auto loaded = load_scenario(scenario, lenient);
  print_issues(loaded.report);
  if (!loaded.scenario) return exit_code::validation;
  const auto& sc = *loaded.scenario;
  try {
    std::vector<ProductionStep> steps;
    if (keys.empty()) {
      steps = all_steps(sc.system);
    } else {
      for (const auto& k : keys) {
        auto s = parse_model_key(k);
        if (!s) {
          std::cerr << "error: '" << k << "' is not a model key (module__configuration__operator)\n";
          return exit_code::validation;
        }
        steps.push_back(*s);
      }
    }
    fs::create_directories(out);
    for (const auto& step : steps) {
      const auto data = generate_operating_data(sc, step, cycles, anomaly, seed.value_or(sc.seed));
      const fs::path file = out / (model_key(step) + ".csv");
      save_csv(file, data);
      std::cerr << "wrote " << file.string() << "\n";
    }
    return exit_code::ok;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::internal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-organized reconfiguration management for modular production systems"};
  app.require_subcommand(1);

  RunManifest run;
  std::uint64_t run_seed = 0;
  auto* run_cmd = app.add_subcommand("run", "identify demand, generate, optimize, evaluate and select");
  run_cmd->add_option("--scenario", run.scenario, "scenario JSON")->required();
  run_cmd->add_option("--models", run.models, "model store directory")->required();
  auto* seed_opt = run_cmd->add_option("--seed", run_seed, "run seed (default: scenario seed)");
  run_cmd->add_option("--jobs", run.jobs, "parallel optimization workers")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--deterministic", run.deterministic, "omit timestamps from the report");
  run_cmd->add_flag("--trace", run.trace, "write trace/*.csv event logs");
  run_cmd->add_option("--out", run.out, "output directory");
  run_cmd->add_flag("--lenient", run.lenient, "unknown scenario keys are warnings");

  fs::path a_scenario, a_models, a_out;
  std::vector<fs::path> a_data;
  std::uint64_t a_seed = 0;
  bool a_lenient = false;
  auto* adapt_cmd = app.add_subcommand("adapt", "retrain process models on operating data");
  adapt_cmd->add_option("--scenario", a_scenario, "scenario JSON")->required();
  adapt_cmd->add_option("--models", a_models, "model store directory")->required();
  adapt_cmd->add_option("--data", a_data, "operating datasets named <module>__<configuration>__<operator>.csv");
  auto* a_seed_opt = adapt_cmd->add_option("--seed", a_seed, "training seed (default: scenario seed)");
  adapt_cmd->add_option("--report", a_out, "write the training report here instead of stdout");
  adapt_cmd->add_flag("--lenient", a_lenient, "unknown scenario keys are warnings");

  fs::path v_scenario;
  bool v_lenient = false;
  auto* validate_cmd = app.add_subcommand("validate", "check a scenario file");
  validate_cmd->add_option("--scenario", v_scenario, "scenario JSON")->required();
  validate_cmd->add_flag("--lenient", v_lenient, "unknown keys are warnings");

  fs::path g_scenario, g_out = ".";
  std::vector<std::string> g_keys;
  std::size_t g_cycles = 200;
  std::uint64_t g_seed = 0;
  bool g_anomaly = false, g_lenient = false;
  auto* gen_cmd = app.add_subcommand("generate", "simulate operating data from the scenario plants");
  gen_cmd->add_option("--scenario", g_scenario, "scenario JSON")->required();
  gen_cmd->add_option("--key", g_keys, "model keys (default: every operator)");
  gen_cmd->add_option("--cycles", g_cycles, "cycles per dataset")->check(CLI::PositiveNumber);
  auto* g_seed_opt = gen_cmd->add_option("--seed", g_seed, "data seed (default: scenario seed)");
  gen_cmd->add_flag("--anomaly", g_anomaly, "apply each template's operating anomaly");
  gen_cmd->add_option("--out", g_out, "output directory");
  gen_cmd->add_flag("--lenient", g_lenient, "unknown scenario keys are warnings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code::validation;
  }

  if (*run_cmd) {
    if (*seed_opt) run.seed = run_seed;
    return run_command(run, [](const std::string& s) { std::cerr << s << "\n"; });
  }
  if (*adapt_cmd)
    return cmd_adapt(a_scenario, a_models, a_data, *a_seed_opt ? std::optional(a_seed) : std::nullopt, a_out,
                     a_lenient);
  if (*validate_cmd) return cmd_validate(v_scenario, v_lenient);
  if (*gen_cmd)
    return cmd_generate(g_scenario, g_keys, g_cycles, *g_seed_opt ? std::optional(g_seed) : std::nullopt,
                        g_anomaly, g_out, g_lenient);
  return exit_code::internal;
}
