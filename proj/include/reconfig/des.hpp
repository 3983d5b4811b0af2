#pragma once

// Discrete-event simulation of one system configuration. Every module is a
// two-state machine (standby / service). Workpieces flow through the
// sequence with single-piece buffers between consecutive steps; a module
// starts a service cycle only when its input piece is available, its
// previous cycle has finished and the buffer behind the step is empty.
//
// Time is kept in integer units of kTimeResolution seconds. Service
// durations are rounded to that grid, and standby is counted in ticks equal
// to the gcd of all service durations, so each module's service time plus
// standby time equals the makespan exactly.

#include <array>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "reconfig/model.hpp"
#include "reconfig/narx.hpp"

namespace reconfig {

inline constexpr double kTimeResolution = 0.1;  // seconds per time unit

using ModelSet = std::map<std::string, std::shared_ptr<const NarxModel>, std::less<>>;

/// Store key of the process model behind one step: module__config__operator.
std::string model_key(const ProductionStep& step);

struct PlanStep {
  std::string module_id;
  std::string configuration_id;
  ProcessOperator op;
  double standby_energy = 0.0;
  double standby_cost = 0.0;
  ScalarMap standby_energy_map;
  ScalarMap standby_cost_map;
  std::shared_ptr<const NarxModel> model;
};

struct SimulationPlan {
  std::vector<PlanStep> steps;

  /// Flattened per-step parameter bounds.
  std::vector<ParameterBound> parameter_bounds() const;
  ParameterSet unflatten(std::span<const double> flat) const;
};

/// Resolves a sequence against the system and the model set. Throws
/// ReconfigError on unknown ids or a model whose actuation dimension does
/// not match its operator.
SimulationPlan make_plan(const ProductionSystem& system, const ProductionSequence& sequence,
                         const ModelSet& models);

/// Service duration rounded to the time grid, at least one unit.
long duration_units(double seconds);

/// sum over s standby cycles of g(c); with an affine g this is s * g(c).
double standby_effort(double c, const ScalarMap& g, long s);

struct ModuleResult {
  std::string module_id;
  long service_cycles = 0;  // p
  long standby_cycles = 0;  // s
  double service_time = 0.0;
  double standby_time = 0.0;
  /// Per-cycle criterion outputs y^z(k) in cycle order (energy and cost).
  std::array<std::vector<std::vector<double>>, 3> trajectories;
  EffortVector service;
  EffortVector standby;
  EffortVector total;
};

struct TraceEvent {
  double time = 0.0;
  std::string module_id;
  std::string state;  // "service" | "standby"
  std::string event;  // "entry" | "exit"
  long cycle = 0;
};

struct SimulationResult {
  std::vector<ModuleResult> modules;  // ascending module id
  EffortVector f;                     // system-level efforts
  double makespan = 0.0;
  double tick = 0.0;
  long makespan_units = 0;
  long tick_units = 0;
  /// Free-running outputs y(k) and coupling inputs w(k) per sequence step.
  std::vector<std::vector<std::vector<double>>> step_outputs;
  std::vector<std::vector<std::vector<double>>> step_couplings;
  std::vector<TraceEvent> trace;
};

struct SimulationOptions {
  bool trace = false;
};

/// Throws ReconfigError when U is outside an operator's bounds or does not
/// match the plan's shape.
SimulationResult simulate(const SimulationPlan& plan, const ParameterSet& parameters,
                          int lot_size, const SimulationOptions& options = {});

void write_trace_csv(std::ostream& os, const SimulationResult& result);

}  // namespace reconfig
