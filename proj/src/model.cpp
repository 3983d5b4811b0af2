#include "reconfig/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace reconfig {

std::string_view to_string(Criterion z) {
  switch (z) {
    case Criterion::time: return "time";
    case Criterion::energy: return "energy";
    case Criterion::cost: return "cost";
  }
  return "?";
}

std::string_view unit_of(Criterion z) {
  switch (z) {
    case Criterion::time: return "s";
    case Criterion::energy: return "J";
    case Criterion::cost: return "CU";
  }
  return "?";
}

std::optional<Criterion> parse_criterion(std::string_view name) {
  for (Criterion z : kCriteria) {
    if (to_string(z) == name) return z;
  }
  return std::nullopt;
}

EffortVector& EffortVector::operator+=(const EffortVector& other) {
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += other.values[i];
  return *this;
}

bool EffortVector::is_valid() const {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v) && v >= 0.0; });
}

std::optional<std::string> CriteriaWeights::check(double time, double energy, double cost) {
  for (double w : {time, energy, cost}) {
    if (!std::isfinite(w) || w < 0.0 || w > 1.0) return "weight outside [0, 1]";
  }
  if (std::abs(time + energy + cost - 1.0) > kSumTolerance) return "weights sum != 1";
  return std::nullopt;
}

CriteriaWeights::CriteriaWeights(double time, double energy, double cost)
    : w_{time, energy, cost} {
  if (auto err = check(time, energy, cost)) throw ReconfigError(*err);
}

// ---------------------------------------------------------------- states

StateDescription& StateDescription::set(std::string name, Interval value) {
  props_[std::move(name)] = value;
  return *this;
}

std::optional<Interval> StateDescription::get(std::string_view name) const {
  auto it = props_.find(name);
  if (it == props_.end()) return std::nullopt;
  return it->second;
}

bool StateDescription::is_valid() const {
  return std::all_of(props_.begin(), props_.end(), [](const auto& kv) {
    return std::isfinite(kv.second.lo) && std::isfinite(kv.second.hi) && kv.second.is_valid();
  });
}

std::string StateDescription::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [name, v] : props_) {
    if (!first) os << ", ";
    first = false;
    os << name << ": ";
    if (v.is_exact())
      os << v.lo;
    else
      os << '[' << v.lo << ", " << v.hi << ']';
  }
  os << '}';
  return os.str();
}

bool state_satisfies(const StateDescription& actual, const StateDescription& required) {
  for (const auto& [name, req] : required.properties()) {
    auto have = actual.get(name);
    if (!have || !req.contains(*have)) return false;
  }
  return true;
}

// ------------------------------------------------------------- operators

double DurationModel::evaluate(const std::vector<double>& u) const {
  double d = base;
  for (std::size_t i = 0; i < coefficients.size() && i < u.size(); ++i) d += coefficients[i] * u[i];
  return d;
}

double DurationModel::minimum_over(const std::vector<ParameterBound>& bounds) const {
  double d = base;
  for (std::size_t i = 0; i < coefficients.size() && i < bounds.size(); ++i) {
    d += std::min(coefficients[i] * bounds[i].lo, coefficients[i] * bounds[i].hi);
  }
  return d;
}

const ProcessOperator* ModuleConfiguration::find_operator(std::string_view op_id) const {
  auto it = std::find_if(operators.begin(), operators.end(),
                         [&](const ProcessOperator& op) { return op.id == op_id; });
  return it == operators.end() ? nullptr : &*it;
}

std::optional<EffortVector> ModuleConfiguration::switch_effort_from(std::string_view source) const {
  if (source == id) return EffortVector::zero();
  auto it = switch_efforts.find(source);
  if (it == switch_efforts.end()) return std::nullopt;
  return it->second;
}

const ModuleConfiguration* Cppm::find_configuration(std::string_view config_id) const {
  auto it = std::find_if(configurations.begin(), configurations.end(),
                         [&](const ModuleConfiguration& c) { return c.id == config_id; });
  return it == configurations.end() ? nullptr : &*it;
}

const ModuleConfiguration& Cppm::current() const {
  const auto* c = find_configuration(current_configuration);
  if (c == nullptr) throw ReconfigError("module " + id + ": unknown current configuration");
  return *c;
}

bool LayoutGraph::has_location(int id) const {
  return std::find(locations.begin(), locations.end(), id) != locations.end();
}

bool LayoutGraph::adjacent(int a, int b) const {
  return std::any_of(edges.begin(), edges.end(), [&](const TransportEdge& e) {
    return (e.a == a && e.b == b) || (e.a == b && e.b == a);
  });
}

std::string to_string(const ProductionStep& step) {
  return step.module_id + "/" + step.configuration_id + "/" + step.operator_id;
}

std::string to_string(const ProductionSequence& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += " -> ";
    out += to_string(seq[i]);
  }
  return out.empty() ? "<empty>" : out;
}

const Cppm* ProductionSystem::find_module(std::string_view id) const {
  auto it = std::find_if(modules.begin(), modules.end(),
                         [&](const Cppm& m) { return m.id == id; });
  return it == modules.end() ? nullptr : &*it;
}

ProductionSystem ProductionSystem::restricted_to_current() const {
  ProductionSystem out = *this;
  for (auto& m : out.modules) {
    std::erase_if(m.configurations, [&](const ModuleConfiguration& c) {
      return c.id != m.current_configuration;
    });
  }
  return out;
}

}  // namespace reconfig
