#pragma once

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "reconfig/model.hpp"

namespace reconfig {

struct LayoutVariant {
  LayoutAssignment assignment;
  /// Location pairs crossed between consecutive steps on different modules.
  std::vector<std::pair<int, int>> transports;
  friend bool operator==(const LayoutVariant&, const LayoutVariant&) = default;
};

/// Distinct modules of a sequence in ascending id order.
std::vector<std::string> modules_of(const ProductionSequence& sequence);

/// Brute force over injective module -> location assignments. Locations in
/// `blocked` stay occupied by modules outside the sequence. Every pair of
/// consecutive steps on different modules must sit on adjacent locations.
/// Ordered lexicographically by the location tuple of modules_of(sequence).
std::vector<LayoutVariant> enumerate_layouts(const ProductionSequence& sequence,
                                             const LayoutGraph& graph,
                                             const std::set<int>& blocked = {});

/// Locations held by modules that `sequence` does not use.
std::set<int> occupied_by_others(const ProductionSystem& system,
                                 const ProductionSequence& sequence);

/// Cheapest relocation between two locations: shortest path by time with
/// (energy, cost) as lexicographic tie-breaks, summing whole effort vectors.
/// nullopt when the locations are disconnected.
std::optional<EffortVector> relocation_effort(const LayoutGraph& graph, int from, int to);

/// System-level reconfiguration effort: configuration switches plus module
/// relocations. nullopt marks an infeasible variant (unreachable location or
/// missing switch-table entry).
std::optional<EffortVector> reconfiguration_effort(const LayoutVariant& variant,
                                                   const ProductionSystem& system,
                                                   const ProductionSequence& sequence);

}  // namespace reconfig
