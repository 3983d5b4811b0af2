#include "reconfig/capability.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace reconfig {

std::vector<ModuleAlternative> module_level_alternatives(const Cppm& module,
                                                         const StateDescription& target) {
  std::vector<ModuleAlternative> out;
  for (const auto& config : module.configurations) {
    for (const auto& op : config.operators) {
      if (state_satisfies(op.output, target)) out.push_back({config.id, op.id});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

class BackwardChainer {
public:
  BackwardChainer(const ProductionSystem& system, const ProductionOrder& order,
                  const SearchLimits& limits)
      : order_(order), limits_(limits) {
    for (const auto& m : system.modules) modules_.push_back(&m);
    std::sort(modules_.begin(), modules_.end(),
              [](const Cppm* a, const Cppm* b) { return a->id < b->id; });
  }

  AlternativeSearch run() {
    SequenceDraft root{{}, order_.output, 0};
    if (state_satisfies(order_.input, root.frontier)) {
      complete_.insert(root.steps);
    } else {
      std::vector<StateDescription> visited{root.frontier};
      std::map<std::string, std::string, std::less<>> fixed;
      expand(root, visited, fixed);
    }
    AlternativeSearch out;
    out.expanded = expanded_;
    out.warnings = std::move(warnings_);
    for (const auto& seq : complete_) {
      out.drafts.push_back({seq, seq.empty() ? order_.output : frontier_of(seq), seq.size()});
    }
    return out;
  }

private:
  StateDescription frontier_of(const ProductionSequence& seq) const {
    const auto& s = seq.front();
    for (const Cppm* m : modules_) {
      if (m->id != s.module_id) continue;
      if (const auto* c = m->find_configuration(s.configuration_id)) {
        if (const auto* op = c->find_operator(s.operator_id)) return op->input;
      }
    }
    return {};
  }

  void expand(const SequenceDraft& draft, std::vector<StateDescription>& visited,
              std::map<std::string, std::string, std::less<>>& fixed) {
    for (const Cppm* module : modules_) {
      auto pinned = fixed.find(module->id);
      for (const auto& alt : module_level_alternatives(*module, draft.frontier)) {
        if (truncated_) return;
        // One configuration per module within a system configuration.
        if (pinned != fixed.end() && pinned->second != alt.configuration_id) continue;
        const auto* op = module->find_configuration(alt.configuration_id)->find_operator(alt.operator_id);
        if (std::find(visited.begin(), visited.end(), op->input) != visited.end()) continue;

        if (expanded_ >= limits_.max_branches) {
          truncated_ = true;
          warnings_.push_back("branch limit of " + std::to_string(limits_.max_branches) +
                              " reached; search truncated");
          return;
        }
        ++expanded_;

        SequenceDraft child;
        child.steps.reserve(draft.steps.size() + 1);
        child.steps.push_back({module->id, alt.configuration_id, alt.operator_id});
        child.steps.insert(child.steps.end(), draft.steps.begin(), draft.steps.end());
        child.frontier = op->input;
        child.depth = draft.depth + 1;

        if (state_satisfies(order_.input, child.frontier)) {
          complete_.insert(child.steps);
          continue;
        }
        if (child.depth >= limits_.max_depth) {
          warnings_.push_back("depth limit pruned branch at " + to_string(child.steps));
          continue;
        }

        const bool newly_pinned = pinned == fixed.end();
        if (newly_pinned) fixed.emplace(module->id, alt.configuration_id);
        visited.push_back(child.frontier);
        expand(child, visited, fixed);
        visited.pop_back();
        if (newly_pinned) fixed.erase(module->id);
      }
    }
  }

  const ProductionOrder& order_;
  SearchLimits limits_;
  std::vector<const Cppm*> modules_;
  std::set<ProductionSequence> complete_;
  std::vector<std::string> warnings_;
  std::size_t expanded_ = 0;
  bool truncated_ = false;
};

}  // namespace

AlternativeSearch generate_alternatives(const ProductionSystem& system,
                                        const ProductionOrder& order,
                                        const SearchLimits& limits) {
  if (limits.max_depth == 0 || limits.max_branches == 0)
    throw ReconfigError("search limits must be positive");
  return BackwardChainer(system, order, limits).run();
}

DemandResult identify_demand(const ProductionSystem& system, const ProductionOrder& order,
                             const SearchLimits& limits) {
  auto search = generate_alternatives(system.restricted_to_current(), order, limits);
  DemandResult result;
  for (auto& d : search.drafts) result.feasible_sequences.push_back(std::move(d.steps));
  result.demand_exists = result.feasible_sequences.empty();
  return result;
}

}  // namespace reconfig
