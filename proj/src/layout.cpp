#include "reconfig/layout.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <tuple>

namespace reconfig {

std::vector<std::string> modules_of(const ProductionSequence& sequence) {
  std::vector<std::string> ids;
  for (const auto& s : sequence) ids.push_back(s.module_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

namespace {

struct Enumerator {
  const ProductionSequence& sequence;
  const LayoutGraph& graph;
  std::vector<std::string> modules;
  std::vector<int> free_locations;
  std::vector<int> chosen;
  std::vector<bool> used;
  std::vector<LayoutVariant> out;

  void place(std::size_t depth) {
    if (depth == modules.size()) {
      emit();
      return;
    }
    for (std::size_t i = 0; i < free_locations.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      chosen.push_back(free_locations[i]);
      place(depth + 1);
      chosen.pop_back();
      used[i] = false;
    }
  }

  void emit() {
    LayoutVariant v;
    for (std::size_t i = 0; i < modules.size(); ++i) v.assignment[modules[i]] = chosen[i];
    for (std::size_t i = 1; i < sequence.size(); ++i) {
      const auto& prev = sequence[i - 1].module_id;
      const auto& next = sequence[i].module_id;
      if (prev == next) continue;
      int a = v.assignment.at(prev);
      int b = v.assignment.at(next);
      if (!graph.adjacent(a, b)) return;
      v.transports.emplace_back(a, b);
    }
    out.push_back(std::move(v));
  }
};

using PathKey = std::tuple<double, double, double>;

PathKey key_of(const EffortVector& e) { return {e.time(), e.energy(), e.cost()}; }

}  // namespace

std::vector<LayoutVariant> enumerate_layouts(const ProductionSequence& sequence,
                                             const LayoutGraph& graph,
                                             const std::set<int>& blocked) {
  Enumerator en{sequence, graph, modules_of(sequence), {}, {}, {}, {}};
  for (int loc : graph.locations) {
    if (!blocked.contains(loc)) en.free_locations.push_back(loc);
  }
  std::sort(en.free_locations.begin(), en.free_locations.end());
  if (en.modules.empty() || en.modules.size() > en.free_locations.size()) return {};
  en.used.assign(en.free_locations.size(), false);
  en.place(0);
  return std::move(en.out);
}

std::set<int> occupied_by_others(const ProductionSystem& system,
                                 const ProductionSequence& sequence) {
  auto used = modules_of(sequence);
  std::set<int> out;
  for (const auto& m : system.modules) {
    if (m.location && !std::binary_search(used.begin(), used.end(), m.id)) out.insert(*m.location);
  }
  return out;
}

std::optional<EffortVector> relocation_effort(const LayoutGraph& graph, int from, int to) {
  if (from == to) return EffortVector::zero();
  std::map<int, EffortVector> best;
  using Entry = std::pair<PathKey, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  best[from] = EffortVector::zero();
  queue.push({key_of(best[from]), from});
  while (!queue.empty()) {
    auto [key, node] = queue.top();
    queue.pop();
    if (key != key_of(best[node])) continue;
    if (node == to) return best[node];
    for (const auto& e : graph.edges) {
      int next = e.a == node ? e.b : (e.b == node ? e.a : -1);
      if (next == -1 || e.a == e.b) continue;
      EffortVector cand = best[node] + e.effort;
      auto it = best.find(next);
      if (it == best.end() || key_of(cand) < key_of(it->second)) {
        best[next] = cand;
        queue.push({key_of(cand), next});
      }
    }
  }
  return std::nullopt;
}

std::optional<EffortVector> reconfiguration_effort(const LayoutVariant& variant,
                                                   const ProductionSystem& system,
                                                   const ProductionSequence& sequence) {
  std::map<std::string, std::string, std::less<>> target_config;
  for (const auto& s : sequence) target_config.emplace(s.module_id, s.configuration_id);

  EffortVector total;
  for (const auto& [module_id, config_id] : target_config) {
    const Cppm* module = system.find_module(module_id);
    if (module == nullptr) return std::nullopt;
    const auto* target = module->find_configuration(config_id);
    if (target == nullptr) return std::nullopt;
    auto sw = target->switch_effort_from(module->current_configuration);
    if (!sw) return std::nullopt;
    total += *sw;

    auto placed = variant.assignment.find(module_id);
    if (placed == variant.assignment.end()) return std::nullopt;
    if (module->location) {
      auto move = relocation_effort(system.layout, *module->location, placed->second);
      if (!move) return std::nullopt;
      total += *move;
    }
  }
  return total;
}

}  // namespace reconfig
