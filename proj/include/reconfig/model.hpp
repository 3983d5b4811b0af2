#pragma once

// Core domain vocabulary shared by every stage of the reconfiguration
// pipeline: criteria, effort vectors, product state descriptions, process
// operators, modules and the layout graph.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace reconfig {

class ReconfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- criteria

enum class Criterion : std::size_t { time = 0, energy = 1, cost = 2 };

inline constexpr std::array<Criterion, 3> kCriteria{Criterion::time, Criterion::energy,
                                                    Criterion::cost};

std::string_view to_string(Criterion z);
std::string_view unit_of(Criterion z);
std::optional<Criterion> parse_criterion(std::string_view name);

inline constexpr std::size_t index_of(Criterion z) { return static_cast<std::size_t>(z); }

/// Per-criterion scalar triple: seconds, joules, currency units.
struct EffortVector {
  std::array<double, 3> values{0.0, 0.0, 0.0};

  EffortVector() = default;
  EffortVector(double time, double energy, double cost) : values{time, energy, cost} {}

  double& operator[](Criterion z) { return values[index_of(z)]; }
  double operator[](Criterion z) const { return values[index_of(z)]; }

  double time() const { return values[0]; }
  double energy() const { return values[1]; }
  double cost() const { return values[2]; }

  EffortVector& operator+=(const EffortVector& other);
  friend EffortVector operator+(EffortVector a, const EffortVector& b) { return a += b; }
  friend bool operator==(const EffortVector&, const EffortVector&) = default;

  /// All components finite and non-negative.
  bool is_valid() const;
  static EffortVector zero() { return {}; }
};

/// Weights w_z over the three criteria; they sum to one.
class CriteriaWeights {
public:
  static constexpr double kSumTolerance = 1e-9;

  CriteriaWeights() = default;
  /// Throws ReconfigError when a weight is negative or the sum is not 1.
  CriteriaWeights(double time, double energy, double cost);

  double operator[](Criterion z) const { return w_[index_of(z)]; }
  const std::array<double, 3>& values() const { return w_; }

  static std::optional<std::string> check(double time, double energy, double cost);

  friend bool operator==(const CriteriaWeights&, const CriteriaWeights&) = default;

private:
  std::array<double, 3> w_{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
};

// ---------------------------------------------------------- product states

/// Closed interval; an exact value is the degenerate interval [v, v].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval exact(double v) { return {v, v}; }
  bool is_exact() const { return lo == hi; }
  bool is_valid() const { return lo <= hi; }
  bool contains(const Interval& inner) const { return lo <= inner.lo && inner.hi <= hi; }
  friend auto operator<=>(const Interval&, const Interval&) = default;
};

/// Named numeric product properties. Boolean features are encoded as 0/1.
class StateDescription {
public:
  using Properties = std::map<std::string, Interval, std::less<>>;

  StateDescription() = default;
  explicit StateDescription(Properties props) : props_(std::move(props)) {}

  StateDescription& set(std::string name, Interval value);
  StateDescription& set(std::string name, double value) {
    return set(std::move(name), Interval::exact(value));
  }

  const Properties& properties() const { return props_; }
  std::optional<Interval> get(std::string_view name) const;
  bool empty() const { return props_.empty(); }
  std::size_t size() const { return props_.size(); }
  bool is_valid() const;

  std::string to_string() const;

  friend auto operator<=>(const StateDescription&, const StateDescription&) = default;

private:
  Properties props_;
};

/// True iff every property of `required` is defined in `actual` and the actual
/// value (or interval) lies inside the required one. Extra properties in
/// `actual` are ignored.
bool state_satisfies(const StateDescription& actual, const StateDescription& required);

// ------------------------------------------------------- process operators

struct ParameterBound {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const ParameterBound&, const ParameterBound&) = default;
};

/// Affine service-cycle duration in seconds: base + sum_i coefficients[i] * u_i.
struct DurationModel {
  double base = 1.0;
  std::vector<double> coefficients;

  double evaluate(const std::vector<double>& u) const;
  /// Minimum of the affine form over the parameter box.
  double minimum_over(const std::vector<ParameterBound>& bounds) const;
  friend bool operator==(const DurationModel&, const DurationModel&) = default;
};

struct ProcessOperator {
  std::string id;
  StateDescription input;
  StateDescription output;
  std::vector<ParameterBound> parameters;
  std::string model_id;
  DurationModel duration;
  friend bool operator==(const ProcessOperator&, const ProcessOperator&) = default;
};

/// Scalar affine map c -> coef * c + offset used for standby efforts.
struct ScalarMap {
  double coef = 1.0;
  double offset = 0.0;
  double operator()(double c) const { return coef * c + offset; }
  friend bool operator==(const ScalarMap&, const ScalarMap&) = default;
};

struct ModuleConfiguration {
  std::string id;
  std::vector<ProcessOperator> operators;
  /// c_{n,z,standby} per standby cycle for energy and cost. The time
  /// component of a standby cycle is the simulation tick itself.
  double standby_energy = 0.0;
  double standby_cost = 0.0;
  ScalarMap standby_energy_map;
  ScalarMap standby_cost_map;
  /// Effort to switch into this configuration, keyed by source configuration.
  std::map<std::string, EffortVector, std::less<>> switch_efforts;

  const ProcessOperator* find_operator(std::string_view op_id) const;
  /// Zero for self-switch; nullopt when the table has no entry.
  std::optional<EffortVector> switch_effort_from(std::string_view source) const;
  friend bool operator==(const ModuleConfiguration&, const ModuleConfiguration&) = default;
};

/// Cyber-physical production module.
struct Cppm {
  std::string id;
  std::vector<ModuleConfiguration> configurations;
  std::string current_configuration;
  std::optional<int> location;

  const ModuleConfiguration* find_configuration(std::string_view config_id) const;
  const ModuleConfiguration& current() const;
  friend bool operator==(const Cppm&, const Cppm&) = default;
};

// ------------------------------------------------------------------ layout

struct TransportEdge {
  int a = 0;
  int b = 0;
  EffortVector effort;
  friend bool operator==(const TransportEdge&, const TransportEdge&) = default;
};

/// Numbered machine locations joined by undirected transport edges. Each
/// location holds at most one module.
struct LayoutGraph {
  std::vector<int> locations;
  std::vector<TransportEdge> edges;

  bool has_location(int id) const;
  bool adjacent(int a, int b) const;
  friend bool operator==(const LayoutGraph&, const LayoutGraph&) = default;
};

// ---------------------------------------------------- orders & candidates

struct ProductionOrder {
  StateDescription input;
  StateDescription output;
  int lot_size = 1;
  CriteriaWeights weights;
  friend bool operator==(const ProductionOrder&, const ProductionOrder&) = default;
};

struct ProductionStep {
  std::string module_id;
  std::string configuration_id;
  std::string operator_id;
  friend auto operator<=>(const ProductionStep&, const ProductionStep&) = default;
};

using ProductionSequence = std::vector<ProductionStep>;

std::string to_string(const ProductionStep& step);
std::string to_string(const ProductionSequence& seq);

/// Module id -> location id.
using LayoutAssignment = std::map<std::string, int, std::less<>>;

/// Actuation vector per sequence step.
using ParameterSet = std::vector<std::vector<double>>;

struct SystemConfiguration {
  ProductionSequence sequence;
  LayoutAssignment layout;
  EffortVector reconfiguration;
  ParameterSet parameters;
  EffortVector production;
  EffortVector total;
  std::array<double, 3> evaluation{0.0, 0.0, 0.0};
  double utility = 0.0;
};

// ------------------------------------------------------------------ system

/// Modules plus their layout; lookups by id.
struct ProductionSystem {
  std::vector<Cppm> modules;
  LayoutGraph layout;

  const Cppm* find_module(std::string_view id) const;
  /// Copy in which every module only offers its current configuration.
  ProductionSystem restricted_to_current() const;
  friend bool operator==(const ProductionSystem&, const ProductionSystem&) = default;
};

}  // namespace reconfig
