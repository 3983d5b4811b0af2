#pragma once

// Cost-utility analysis over candidate system configurations:
// total efforts -> evaluation values r_z in [0, 1] -> utility v.

#include <array>
#include <vector>

#include "reconfig/model.hpp"

namespace reconfig {

EffortVector total_effort(const EffortVector& reconfiguration, const EffortVector& production);

/// r_z = (a - a_max) / (a_min - a_max) per criterion. A criterion whose
/// totals are all equal maps to 1 everywhere.
std::vector<std::array<double, 3>> evaluation_values(const std::vector<EffortVector>& totals);

double utility(const std::array<double, 3>& r, const CriteriaWeights& weights);

/// Strict ordering used for ranking: higher v first, then lower total time,
/// then the lexicographically smaller sequence, then the smaller layout.
bool ranks_before(const SystemConfiguration& a, const SystemConfiguration& b);

struct RankedConfigurations {
  std::vector<SystemConfiguration> ranked;
  std::size_t selected = 0;
};

/// Fills total, evaluation and utility for every candidate and sorts them.
/// Throws ReconfigError on an empty candidate list.
RankedConfigurations rank(std::vector<SystemConfiguration> candidates,
                          const CriteriaWeights& weights);

const SystemConfiguration& select(const RankedConfigurations& ranked);

}  // namespace reconfig
