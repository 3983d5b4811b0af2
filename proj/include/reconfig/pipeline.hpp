#pragma once

// Reconfiguration management run: demand identification, alternative
// generation, layouts, simulation-based optimization, evaluation and
// selection, plus the persistent model store that carries learned process
// models from one reconfiguration cycle to the next.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "reconfig/des.hpp"
#include "reconfig/evaluator.hpp"
#include "reconfig/layout.hpp"
#include "reconfig/scenario.hpp"

namespace reconfig {

/// Named sub-seed: splitmix64 over base ^ fnv1a(name).
std::uint64_t derive_seed(std::uint64_t base, std::string_view name);

/// Inverse of model_key(); nullopt when the key has not three parts.
std::optional<ProductionStep> parse_model_key(std::string_view key);

/// Runs body(i) for i in [0, n) on up to `jobs` threads. The first exception
/// thrown by any task is rethrown after all threads have joined.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body);

// -------------------------------------------------------------- model store

struct StoredModelInfo {
  int version = 0;
  std::string provenance;
};

/// Directory with one JSON file per model key and an index.json holding the
/// store version and per-model versions.
class ModelStore {
public:
  explicit ModelStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  int store_version() const { return store_version_; }
  const std::map<std::string, StoredModelInfo, std::less<>>& entries() const { return entries_; }

  bool contains(std::string_view key) const;
  NarxModel load(std::string_view key) const;
  /// Writes the model file, then the index. The model keeps its own version.
  void put(const NarxModel& model, std::string provenance);
  void bump_store_version();

private:
  void write_index() const;

  std::filesystem::path dir_;
  int store_version_ = 0;
  std::map<std::string, StoredModelInfo, std::less<>> entries_;
};

using LogSink = std::function<void(const std::string&)>;

/// Every (module, configuration, operator) of the system, in key order.
std::vector<ProductionStep> all_steps(const ProductionSystem& system);

/// Design-phase model: trained on clean data from the template's plant.
NarxModel bootstrap_model(const Scenario& scenario, const ProductionStep& step, std::uint64_t seed);

/// Loads every model of the system from the store, bootstrapping and saving
/// the missing ones.
ModelSet ensure_models(const Scenario& scenario, ModelStore& store, std::uint64_t seed,
                       const LogSink& log = {});

/// Operating data for one step drawn from the template's plant.
OperatingDataset generate_operating_data(const Scenario& scenario, const ProductionStep& step,
                                         std::size_t cycles, bool with_anomaly, std::uint64_t seed);

// ------------------------------------------------------------------- adapt

struct AdaptEntry {
  std::string key;
  std::string status;  // "updated" | "diverged" | "rejected"
  std::string message;
  std::size_t train_samples = 0;
  std::size_t held_out_samples = 0;
  double pre_mse = 0.0;
  double post_mse = 0.0;
  int version = 0;
};

struct AdaptReport {
  std::vector<AdaptEntry> entries;
  int store_version = 0;
  bool updated() const;
  nlohmann::json to_json() const;
};

/// Fraction of each dataset used for training; the rest is held out.
inline constexpr double kTrainFraction = 0.75;

/// Retrains the model named by each dataset's file stem and stores it with
/// its version incremented by one. Failures leave the stored model as is.
AdaptReport adapt_models(const Scenario& scenario, ModelStore& store,
                         const std::vector<std::filesystem::path>& datasets, std::uint64_t seed,
                         const LogSink& log = {});

// ---------------------------------------------------------------- pipeline

struct SequenceOptimization {
  ProductionSequence sequence;
  std::array<SingleOutcome, 3> single;
  NormalizationRanges ranges;
  OptimizationOutcome weighted;
};

/// Three single-criterion runs, the reference ranges and the weighted run.
SequenceOptimization optimize_sequence(const SimulationPlan& plan, const ProductionSequence& sequence,
                                       const ProductionOrder& order, const OptimizerSettings& settings,
                                       std::uint64_t seed);

struct RunOptions {
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

enum class RunStatus { selected, no_demand, no_feasible };

std::string to_string(RunStatus status);

struct PipelineResult {
  RunStatus status = RunStatus::no_feasible;
  std::vector<std::string> stages;
  std::vector<ProductionSequence> current_sequences;  // filled when there is no demand
  std::vector<std::string> warnings;
  std::size_t sequences = 0;
  std::size_t expanded = 0;
  std::vector<SequenceOptimization> optimizations;
  RankedConfigurations ranking;
  /// Per candidate in ranking order, the optimization it came from.
  std::vector<std::size_t> candidate_origin;
  std::map<std::string, int, std::less<>> model_versions;
  int store_version = 0;
};

/// Runs the methodology on validated inputs with the given models.
PipelineResult run_pipeline(const Scenario& scenario, const ModelSet& models, const RunOptions& options,
                            const LogSink& log = {});

nlohmann::json report_json(const Scenario& scenario, const PipelineResult& result, const RunOptions& options);
nlohmann::json selected_json(const PipelineResult& result, const RunOptions& options);
std::string report_text(const PipelineResult& result);

struct RunManifest {
  std::filesystem::path scenario;
  std::filesystem::path models;
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;  // defaults to the scenario seed
  std::size_t jobs = 1;
  bool deterministic = false;
  bool trace = false;
  bool lenient = false;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int validation = 2;
inline constexpr int infeasible = 3;
inline constexpr int internal = 4;
}  // namespace exit_code

/// Full command: load, validate, ensure models, run, write report files.
/// Returns the process exit code.
int run_command(const RunManifest& manifest, const LogSink& log);

}  // namespace reconfig
