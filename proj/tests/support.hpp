#pragma once

// Builders shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <memory>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>

#include <sys/wait.h>
#include <vector>

#include "reconfig/capability.hpp"
#include "reconfig/des.hpp"
#include "reconfig/model.hpp"
#include "reconfig/narx.hpp"
#include "reconfig/plant.hpp"

namespace testing {

using namespace reconfig;

inline StateDescription state(std::initializer_list<std::pair<const char*, double>> props) {
  StateDescription s;
  for (const auto& [k, v] : props) s.set(k, v);
  return s;
}

inline ProcessOperator op(std::string id, StateDescription in, StateDescription out,
                          double duration = 1.0, std::size_t params = 1) {
  ProcessOperator o;
  o.id = std::move(id);
  o.input = std::move(in);
  o.output = std::move(out);
  for (std::size_t i = 0; i < params; ++i) o.parameters.push_back({"u" + std::to_string(i), 0.0, 1.0});
  o.model_id = "m";
  o.duration.base = duration;
  o.duration.coefficients.assign(params, 0.0);
  return o;
}

inline ModuleConfiguration config(std::string id, std::vector<ProcessOperator> ops) {
  ModuleConfiguration c;
  c.id = std::move(id);
  c.operators = std::move(ops);
  return c;
}

inline Cppm module(std::string id, std::vector<ModuleConfiguration> configs, std::optional<int> location = {}) {
  Cppm m;
  m.id = std::move(id);
  m.current_configuration = configs.empty() ? "" : configs.front().id;
  m.configurations = std::move(configs);
  m.location = location;
  return m;
}

inline LayoutGraph line_graph(int n, EffortVector edge = {10.0, 1.0, 1.0}) {
  LayoutGraph g;
  for (int i = 1; i <= n; ++i) g.locations.push_back(i);
  for (int i = 1; i < n; ++i) g.edges.push_back({i, i + 1, edge});
  return g;
}

/// Linear network (no hidden layer) with zero weights: every output equals
/// the given bias whatever the inputs.
inline NarxModel constant_model(std::vector<double> outputs, std::size_t actuations = 1,
                                std::size_t coupling = 0) {
  NarxShape shape;
  shape.outputs = outputs.size();
  shape.actuations = actuations;
  shape.coupling = coupling;
  shape.hidden = {};
  NarxModel m = NarxModel::create("const", shape, 1);
  m.process_net = Mlp::zeros(m.process_net.layer_sizes());
  m.disturbance_net = Mlp::zeros(m.disturbance_net.layer_sizes());
  m.process_net.layers().back().bias = std::move(outputs);
  return m;
}

/// Plan with one step per (module, duration) pair; every step has one
/// parameter in [0, 1] that does not influence the duration.
inline SimulationPlan desk_plan(const std::vector<std::pair<std::string, double>>& steps,
                                std::shared_ptr<const NarxModel> model, double standby = 0.0) {
  SimulationPlan plan;
  for (std::size_t j = 0; j < steps.size(); ++j) {
    PlanStep s;
    s.module_id = steps[j].first;
    s.configuration_id = "c";
    s.op = op("op" + std::to_string(j), {}, {}, steps[j].second);
    s.standby_energy = standby;
    s.standby_cost = standby;
    s.model = model;
    plan.steps.push_back(std::move(s));
  }
  return plan;
}

inline ParameterSet uniform_parameters(const SimulationPlan& plan, double v) {
  ParameterSet p;
  for (const auto& s : plan.steps) p.emplace_back(s.op.parameters.size(), v);
  return p;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("reconfig-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Forward enumeration of operator chains of at most `max_depth` steps:
/// each step's input is satisfied by the state left behind by the previous
/// one (starting at the order input), the final state satisfies the order
/// output, no two steps share an input state and no input equals the order
/// output, each module keeps one configuration, and only the first step may
/// start from a state the order input already satisfies.
inline std::set<ProductionSequence> forward_oracle(const ProductionSystem& sys, const ProductionOrder& order,
                                                   std::size_t max_depth) {
  std::set<ProductionSequence> out;
  if (state_satisfies(order.input, order.output)) {
    out.insert(ProductionSequence{});
    return out;
  }
  struct Choice {
    ProductionStep step;
    const ProcessOperator* op;
  };
  std::vector<Choice> choices;
  for (const auto& m : sys.modules)
    for (const auto& c : m.configurations)
      for (const auto& o : c.operators) choices.push_back({{m.id, c.id, o.id}, &o});

  std::vector<const Choice*> chain;
  std::function<void(const StateDescription&)> extend = [&](const StateDescription& cur) {
    if (!chain.empty() && state_satisfies(cur, order.output)) {
      bool distinct = true;
      for (std::size_t i = 0; i < chain.size() && distinct; ++i) {
        if (chain[i]->op->input == order.output) distinct = false;
        for (std::size_t j = i + 1; j < chain.size() && distinct; ++j)
          if (chain[i]->op->input == chain[j]->op->input) distinct = false;
        if (i > 0 && state_satisfies(order.input, chain[i]->op->input)) distinct = false;
      }
      if (distinct) {
        ProductionSequence seq;
        for (const auto* c : chain) seq.push_back(c->step);
        out.insert(seq);
      }
    }
    if (chain.size() == max_depth) return;
    for (const auto& c : choices) {
      if (!state_satisfies(cur, c.op->input)) continue;
      bool clash = false;
      for (const auto* prev : chain)
        if (prev->step.module_id == c.step.module_id && prev->step.configuration_id != c.step.configuration_id)
          clash = true;
      if (clash) continue;
      chain.push_back(&c);
      extend(c.op->output);
      chain.pop_back();
    }
  };
  extend(order.input);
  return out;
}

/// Single-output-per-lag linear plant y(k) = a y(k-1) + b0 u~(k) + b1 u~(k-1).
inline PlantSpec linear_plant(double a, double b0, double b1, DisturbanceProfile dist = {}, double noise = 0.0,
                              std::uint64_t seed = 1) {
  PlantSpec p;
  p.dynamics.outputs = 1;
  p.dynamics.actuations = 1;
  p.dynamics.bias = {0.0};
  p.dynamics.ar = {{{a}}};
  p.dynamics.input = {{{b0}}, {{b1}}};
  p.disturbance = dist;
  p.noise_std = noise;
  p.seed = seed;
  return p;
}

/// Model with randomized weights, biases and normalization constants.
inline NarxModel random_model(std::uint64_t seed, NarxShape shape) {
  NarxModel m = NarxModel::create("rand", shape, seed);
  std::mt19937_64 rng(seed * 7919 + 1);
  std::uniform_real_distribution<double> d(-0.5, 0.5), sc(0.5, 2.0);
  for (Mlp* net : {&m.process_net, &m.disturbance_net})
    for (auto& L : net->layers())
      for (auto& b : L.bias) b = d(rng);
  for (Normalizer* n : {&m.process_in, &m.process_out, &m.disturbance_in, &m.disturbance_out}) {
    for (auto& v : n->shift) v = d(rng);
    for (auto& v : n->scale) v = sc(rng);
  }
  m.normalization_fitted = true;
  return m;
}

/// Largest componentwise |analytic - central difference| / max(|analytic|,
/// |central difference|, floor) over both networks.
inline double gradient_check_error(const NarxModel& model, std::span<const TrainingSample> batch,
                                   double step = 1e-5, double floor = 1e-6) {
  const NarxGradient g = gradient_of_loss(model, batch);
  double worst = 0.0;
  auto probe = [&](bool process, const std::vector<double>& analytic) {
    NarxModel work = model;
    Mlp& net = process ? work.process_net : work.disturbance_net;
    const auto p = net.parameters();
    for (std::size_t i = 0; i < p.size(); ++i) {
      auto q = p;
      q[i] = p[i] + step;
      net.set_parameters(q);
      const double up = loss(work, batch);
      q[i] = p[i] - step;
      net.set_parameters(q);
      const double down = loss(work, batch);
      const double fd = (up - down) / (2 * step);
      const double denom = std::max({std::abs(analytic[i]), std::abs(fd), floor});
      worst = std::max(worst, std::abs(analytic[i] - fd) / denom);
    }
    net.set_parameters(p);
  };
  probe(true, g.process);
  probe(false, g.disturbance);
  return worst;
}

/// Runs a shell command and returns its exit status.
inline int run_shell(const std::string& cmd) {
  const int raw = std::system(cmd.c_str());
  if (raw == -1) return -1;
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace testing
