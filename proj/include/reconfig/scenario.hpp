#pragma once

// Scenario documents: JSON loading, structural validation and persistence of
// the production system, order, process-model templates and run settings.
// Also the JSON form of trained NARX models.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "reconfig/capability.hpp"
#include "reconfig/model.hpp"
#include "reconfig/narx.hpp"
#include "reconfig/optimizer.hpp"
#include "reconfig/plant.hpp"

namespace reconfig {

/// Template from which the per-step process models are built, together with
/// the synthetic plant that stands in for the real process.
struct ProcessModelSpec {
  std::string id;
  NarxShape shape;
  std::array<CriterionSubsets, 3> criteria;
  std::vector<Interval> output_range;
  std::uint64_t seed = 0;
  PlantDynamics plant;
  double noise_std = 0.0;
  /// Disturbance present during the operating phase.
  DisturbanceProfile anomaly;
  double coupling_lo = 0.0;
  double coupling_hi = 1.0;
  friend bool operator==(const ProcessModelSpec&, const ProcessModelSpec&) = default;
};

struct TrainingSettings {
  double learning_rate = 0.01;
  std::size_t epochs = 150;
  std::size_t batch_size = 16;
  std::size_t bootstrap_cycles = 200;
  friend bool operator==(const TrainingSettings&, const TrainingSettings&) = default;
};

struct Scenario {
  ProductionSystem system;
  ProductionOrder order;
  std::vector<ProcessModelSpec> process_models;
  OptimizerSettings optimizer;
  SearchLimits search;
  TrainingSettings training;
  std::uint64_t seed = 0;

  const ProcessModelSpec* find_process_model(std::string_view id) const;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct ValidationIssue {
  std::string path;  // e.g. modules[0].configurations[1].operators[0].model
  std::string message;
  bool warning = false;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const;  // no errors; warnings allowed
  void error(std::string path, std::string message);
  void warn(std::string path, std::string message);
  std::string to_string() const;
};

struct ScenarioLoad {
  std::optional<Scenario> scenario;  // set only when the report has no errors
  ValidationReport report;
};

/// Parses and validates. Unknown keys are errors unless `lenient`.
ScenarioLoad scenario_from_json(const nlohmann::json& doc, bool lenient = false);
ScenarioLoad load_scenario(const std::filesystem::path& file, bool lenient = false);

/// Semantic checks of an already parsed scenario; every violation is listed.
ValidationReport validate_scenario(const Scenario& scenario);

nlohmann::json scenario_to_json(const Scenario& scenario);
void save_scenario(const std::filesystem::path& file, const Scenario& scenario);

/// Untrained model for one sequence step built from its template.
NarxModel instantiate_model(const ProcessModelSpec& spec, std::string id, std::uint64_t seed);

/// The plant behind a template, with or without the operating anomaly.
PlantSpec plant_of(const ProcessModelSpec& spec, bool with_anomaly, std::uint64_t noise_seed);

/// Excitation over an operator's parameter box and the template's coupling range.
Excitation excitation_of(const ProcessModelSpec& spec, const ProcessOperator& op);

nlohmann::json model_to_json(const NarxModel& model);
NarxModel model_from_json(const nlohmann::json& doc);

std::string to_string(DisturbanceKind kind);

}  // namespace reconfig
