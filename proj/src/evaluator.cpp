#include "reconfig/evaluator.hpp"

#include <algorithm>
#include <tuple>

namespace reconfig {

EffortVector total_effort(const EffortVector& reconfiguration, const EffortVector& production) {
  return reconfiguration + production;
}

std::vector<std::array<double, 3>> evaluation_values(const std::vector<EffortVector>& totals) {
  std::vector<std::array<double, 3>> r(totals.size());
  for (std::size_t z = 0; z < 3; ++z) {
    if (totals.empty()) break;
    double lo = totals.front().values[z];
    double hi = lo;
    for (const auto& t : totals) {
      lo = std::min(lo, t.values[z]);
      hi = std::max(hi, t.values[z]);
    }
    for (std::size_t i = 0; i < totals.size(); ++i) {
      const double a = totals[i].values[z];
      if (hi == lo)
        r[i][z] = 1.0;
      else if (a == lo)
        r[i][z] = 1.0;
      else if (a == hi)
        r[i][z] = 0.0;
      else
        r[i][z] = std::clamp((a - hi) / (lo - hi), 0.0, 1.0);
    }
  }
  return r;
}

double utility(const std::array<double, 3>& r, const CriteriaWeights& weights) {
  const auto& w = weights.values();
  return w[0] * r[0] + w[1] * r[1] + w[2] * r[2];
}

bool ranks_before(const SystemConfiguration& a, const SystemConfiguration& b) {
  if (a.utility != b.utility) return a.utility > b.utility;
  if (a.total.time() != b.total.time()) return a.total.time() < b.total.time();
  return std::tie(a.sequence, a.layout) < std::tie(b.sequence, b.layout);
}

RankedConfigurations rank(std::vector<SystemConfiguration> candidates,
                          const CriteriaWeights& weights) {
  if (candidates.empty()) throw ReconfigError("no candidate configurations to evaluate");
  std::vector<EffortVector> totals;
  totals.reserve(candidates.size());
  for (auto& c : candidates) {
    c.total = total_effort(c.reconfiguration, c.production);
    totals.push_back(c.total);
  }
  const auto r = evaluation_values(totals);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    candidates[i].evaluation = r[i];
    candidates[i].utility = utility(r[i], weights);
  }
  std::stable_sort(candidates.begin(), candidates.end(), ranks_before);
  return {std::move(candidates), 0};
}

const SystemConfiguration& select(const RankedConfigurations& ranked) {
  if (ranked.ranked.empty()) throw ReconfigError("select: empty candidate list");
  return ranked.ranked.at(ranked.selected);
}

}  // namespace reconfig
