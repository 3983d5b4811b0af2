#pragma once

// Backward-chaining generation of production sequences from process
// operators. A branch starts at the order's desired output, repeatedly asks
// every module for an operator whose guaranteed output satisfies the current
// frontier, and completes once the order's input product satisfies it.

#include <cstddef>
#include <string>
#include <vector>

#include "reconfig/model.hpp"

namespace reconfig {

struct SearchLimits {
  std::size_t max_depth = 8;
  std::size_t max_branches = 10000;
  friend bool operator==(const SearchLimits&, const SearchLimits&) = default;
};

/// Partial sequence built back-to-front. `steps` is in execution order.
struct SequenceDraft {
  ProductionSequence steps;
  StateDescription frontier;
  std::size_t depth = 0;
};

struct DemandResult {
  bool demand_exists = true;
  std::vector<ProductionSequence> feasible_sequences;
};

struct ModuleAlternative {
  std::string configuration_id;
  std::string operator_id;
  friend auto operator<=>(const ModuleAlternative&, const ModuleAlternative&) = default;
};

struct AlternativeSearch {
  std::vector<SequenceDraft> drafts;
  std::vector<std::string> warnings;
  std::size_t expanded = 0;
};

/// Every (configuration, operator) of `module` whose output satisfies
/// `target`, across all configurations, sorted lexicographically.
std::vector<ModuleAlternative> module_level_alternatives(const Cppm& module,
                                                         const StateDescription& target);

AlternativeSearch generate_alternatives(const ProductionSystem& system,
                                        const ProductionOrder& order,
                                        const SearchLimits& limits = {});

/// Searches with each module fixed to its current configuration.
DemandResult identify_demand(const ProductionSystem& system, const ProductionOrder& order,
                             const SearchLimits& limits = {});

}  // namespace reconfig
