#include "reconfig/des.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>

namespace reconfig {

std::string model_key(const ProductionStep& step) {
  return step.module_id + "__" + step.configuration_id + "__" + step.operator_id;
}

std::vector<ParameterBound> SimulationPlan::parameter_bounds() const {
  std::vector<ParameterBound> out;
  for (const auto& s : steps) out.insert(out.end(), s.op.parameters.begin(), s.op.parameters.end());
  return out;
}

ParameterSet SimulationPlan::unflatten(std::span<const double> flat) const {
  ParameterSet out;
  std::size_t pos = 0;
  for (const auto& s : steps) {
    const std::size_t n = s.op.parameters.size();
    if (pos + n > flat.size()) throw ReconfigError("parameter vector too short");
    out.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                     flat.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
  }
  if (pos != flat.size()) throw ReconfigError("parameter vector too long");
  return out;
}

SimulationPlan make_plan(const ProductionSystem& system, const ProductionSequence& sequence,
                         const ModelSet& models) {
  SimulationPlan plan;
  for (const auto& step : sequence) {
    const Cppm* module = system.find_module(step.module_id);
    if (module == nullptr) throw ReconfigError("unknown module " + step.module_id);
    const auto* config = module->find_configuration(step.configuration_id);
    if (config == nullptr) throw ReconfigError("unknown configuration " + to_string(step));
    const auto* op = config->find_operator(step.operator_id);
    if (op == nullptr) throw ReconfigError("unknown operator " + to_string(step));
    auto it = models.find(model_key(step));
    if (it == models.end() || !it->second) throw ReconfigError("no process model for " + to_string(step));
    if (it->second->shape.actuations != op->parameters.size())
      throw ReconfigError("model/operator mismatch at " + to_string(step));
    plan.steps.push_back({step.module_id, step.configuration_id, *op, config->standby_energy,
                          config->standby_cost, config->standby_energy_map,
                          config->standby_cost_map, it->second});
  }
  return plan;
}

long duration_units(double seconds) {
  return std::max(1L, std::lround(seconds / kTimeResolution));
}

double standby_effort(double c, const ScalarMap& g, long s) {
  double total = 0.0;
  for (long k = 1; k <= s; ++k) total += g(c);
  return total;
}

namespace {

struct ServiceInterval {
  long start = 0;
  long end = 0;
  std::size_t step = 0;
  long piece = 0;
};

struct Schedule {
  std::vector<std::string> modules;                    // ascending id
  std::vector<std::vector<ServiceInterval>> services;  // per module
  long makespan = 0;
};

Schedule schedule(const std::vector<std::string>& step_module, const std::vector<long>& dur,
                  long lot) {
  const std::size_t m = step_module.size();
  Schedule sch;
  sch.modules = step_module;
  std::sort(sch.modules.begin(), sch.modules.end());
  sch.modules.erase(std::unique(sch.modules.begin(), sch.modules.end()), sch.modules.end());
  sch.services.resize(sch.modules.size());

  // Steps served by each module, highest step first.
  std::vector<std::vector<std::size_t>> steps_of(sch.modules.size());
  for (std::size_t j = m; j-- > 0;) {
    auto pos = std::lower_bound(sch.modules.begin(), sch.modules.end(), step_module[j]) - sch.modules.begin();
    steps_of[static_cast<std::size_t>(pos)].push_back(j);
  }

  std::vector<long> buffer(m + 1, 0);  // buffer[j]: piece waiting for step j
  std::vector<std::optional<ServiceInterval>> busy(sch.modules.size());
  long next_raw = 1;
  long done = 0;
  long t = 0;
  while (true) {
    for (std::size_t mi = 0; mi < busy.size(); ++mi) {
      if (!busy[mi] || busy[mi]->end != t) continue;
      if (busy[mi]->step + 1 == m)
        ++done;
      else
        buffer[busy[mi]->step + 1] = busy[mi]->piece;
      busy[mi].reset();
    }
    if (done == lot) break;

    for (bool started = true; started;) {
      started = false;
      for (std::size_t mi = 0; mi < busy.size(); ++mi) {
        if (busy[mi]) continue;
        for (std::size_t j : steps_of[mi]) {
          const bool input = j == 0 ? next_raw <= lot : buffer[j] != 0;
          const bool output_free = j + 1 == m || buffer[j + 1] == 0;
          if (!input || !output_free) continue;
          long piece = 0;
          if (j == 0) {
            piece = next_raw++;
          } else {
            piece = buffer[j];
            buffer[j] = 0;
          }
          busy[mi] = ServiceInterval{t, t + dur[j], j, piece};
          sch.services[mi].push_back(*busy[mi]);
          started = true;
          break;
        }
      }
    }

    std::optional<long> next;
    for (const auto& b : busy)
      if (b && (!next || b->end < *next)) next = b->end;
    if (!next) throw std::logic_error("simulation stalled with unfinished work");
    t = *next;
  }
  sch.makespan = t;
  return sch;
}

double clamp_to(double v, const Interval& range) { return std::clamp(v, range.lo, range.hi); }

}  // namespace

SimulationResult simulate(const SimulationPlan& plan, const ParameterSet& parameters, int lot_size,
                          const SimulationOptions& options) {
  const std::size_t m = plan.steps.size();
  if (m == 0) throw ReconfigError("cannot simulate an empty sequence");
  if (lot_size < 1) throw ReconfigError("lot size must be >= 1");
  if (parameters.size() != m) throw ReconfigError("parameter set does not match sequence length");

  std::vector<long> dur(m);
  std::vector<std::string> step_module(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto& st = plan.steps[j];
    const auto& u = parameters[j];
    if (u.size() != st.op.parameters.size())
      throw ReconfigError("parameter count mismatch at step " + std::to_string(j));
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto& b = st.op.parameters[i];
      if (!(u[i] >= b.lo && u[i] <= b.hi))
        throw ReconfigError("parameter " + b.name + " of " + st.op.id + " out of bounds");
    }
    dur[j] = duration_units(st.op.duration.evaluate(u));
    step_module[j] = st.module_id;
  }

  const long lot = lot_size;
  Schedule sch = schedule(step_module, dur, lot);
  long tick = 0;
  for (long d : dur) tick = std::gcd(tick, d);

  SimulationResult res;
  res.makespan_units = sch.makespan;
  res.tick_units = tick;
  res.makespan = static_cast<double>(sch.makespan) * kTimeResolution;
  res.tick = static_cast<double>(tick) * kTimeResolution;

  // Free-running process models, one per step, coupled to the predecessor
  // step's previous-cycle output.
  res.step_outputs.assign(m, {});
  res.step_couplings.assign(m, {});
  std::vector<std::array<std::vector<std::vector<double>>, 3>> step_traj(m);
  std::vector<EffortVector> step_service(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto& st = plan.steps[j];
    const NarxModel& model = *st.model;
    const auto& u = parameters[j];
    ProcessHistory hist(model.shape);
    if (!model.recent_disturbances.empty()) hist.set_disturbances(model.recent_disturbances);
    const CriterionView energy(model, Criterion::energy);
    const CriterionView cost(model, Criterion::cost);

    for (long k = 1; k <= lot; ++k) {
      std::vector<double> w(model.shape.coupling, 0.0);
      if (j > 0 && k > 1) {
        const auto& prev = res.step_outputs[j - 1][static_cast<std::size_t>(k - 2)];
        for (std::size_t i = 0; i < w.size() && i < prev.size(); ++i) w[i] = prev[i];
      }
      if (!w.empty()) hist.set_coupling(w);

      auto dhat = estimate_disturbance(model, hist, k);
      auto yhat = predict(model, hist, u, k);
      for (const CriterionView* view : {&energy, &cost}) {
        auto yz = view->predict(hist, u, k);
        const auto& kept = view->retained_outputs();
        for (std::size_t i = 0; i < yz.size(); ++i) yz[i] = clamp_to(yz[i], model.output_range[kept[i]]);
        const Criterion z = view->criterion();
        step_service[j][z] += model.criteria[index_of(z)].effort_map(yz);
        step_traj[j][index_of(z)].push_back(std::move(yz));
      }
      res.step_outputs[j].push_back(yhat);
      res.step_couplings[j].push_back(w);
      hist.advance(yhat, u, dhat);
    }
    step_service[j][Criterion::time] = static_cast<double>(dur[j] * lot) * kTimeResolution;
  }

  for (std::size_t mi = 0; mi < sch.modules.size(); ++mi) {
    ModuleResult mr;
    mr.module_id = sch.modules[mi];
    long service_units = 0;
    for (const auto& iv : sch.services[mi]) service_units += iv.end - iv.start;
    mr.service_cycles = static_cast<long>(sch.services[mi].size());
    const long idle = sch.makespan - service_units;
    if (idle < 0 || idle % tick != 0) throw std::logic_error("standby time not aligned to ticks");
    mr.standby_cycles = idle / tick;
    mr.service_time = static_cast<double>(service_units) * kTimeResolution;
    mr.standby_time = static_cast<double>(mr.standby_cycles * tick) * kTimeResolution;

    const PlanStep* config_step = nullptr;
    for (std::size_t j = 0; j < m; ++j) {
      if (plan.steps[j].module_id != mr.module_id) continue;
      if (config_step == nullptr) config_step = &plan.steps[j];
      mr.service += step_service[j];
      for (Criterion z : {Criterion::energy, Criterion::cost}) {
        auto& dst = mr.trajectories[index_of(z)];
        const auto& src = step_traj[j][index_of(z)];
        dst.insert(dst.end(), src.begin(), src.end());
      }
    }
    mr.service[Criterion::time] = mr.service_time;
    mr.standby[Criterion::time] = mr.standby_time;
    mr.standby[Criterion::energy] =
        standby_effort(config_step->standby_energy, config_step->standby_energy_map, mr.standby_cycles);
    mr.standby[Criterion::cost] =
        standby_effort(config_step->standby_cost, config_step->standby_cost_map, mr.standby_cycles);
    mr.total = mr.standby + mr.service;

    if (service_units + mr.standby_cycles * tick != sch.makespan)
      throw std::logic_error("module " + mr.module_id + " does not cover the makespan");
    res.modules.push_back(std::move(mr));
  }

  res.f[Criterion::time] = res.makespan;
  for (const auto& mr : res.modules) {
    res.f[Criterion::energy] += mr.total[Criterion::energy];
    res.f[Criterion::cost] += mr.total[Criterion::cost];
  }

  if (options.trace) {
    for (std::size_t mi = 0; mi < sch.modules.size(); ++mi) {
      const auto& id = sch.modules[mi];
      auto emit = [&](long at, const char* state, const char* ev, long cycle) {
        res.trace.push_back({static_cast<double>(at) * kTimeResolution, id, state, ev, cycle});
      };
      long cursor = 0;
      long standby_cycle = 0;
      auto standby_until = [&](long until) {
        if (until <= cursor) return;
        emit(cursor, "standby", "entry", standby_cycle + 1);
        standby_cycle += (until - cursor) / tick;
        emit(until, "standby", "exit", standby_cycle);
      };
      long service_cycle = 0;
      for (const auto& iv : sch.services[mi]) {
        standby_until(iv.start);
        ++service_cycle;
        emit(iv.start, "service", "entry", service_cycle);
        emit(iv.end, "service", "exit", service_cycle);
        cursor = iv.end;
      }
      standby_until(sch.makespan);
    }
    std::stable_sort(res.trace.begin(), res.trace.end(),
                     [](const TraceEvent& a, const TraceEvent& b) { return a.time < b.time; });
  }
  return res;
}

void write_trace_csv(std::ostream& os, const SimulationResult& result) {
  os << "time,module,state,event,cycle\n";
  os << std::fixed << std::setprecision(1);
  for (const auto& e : result.trace)
    os << e.time << ',' << e.module_id << ',' << e.state << ',' << e.event << ',' << e.cycle << '\n';
}

}  // namespace reconfig
