#include "flowsynth/metrics/graph_metrics.hpp"

#include "flowsynth/kbgraph/constraints.hpp"

namespace flowsynth {

double cspc(const ProcessGraph& g, const std::vector<CriticalPathRule>& rules, const KnowledgeBase& kb) {
  if (rules.empty()) return 1.0;
  require_known_units(g, kb);
  std::size_t satisfied = 0;
  for (const auto& rule : rules) {
    if (critical_path_satisfied(g, kb, rule)) ++satisfied;
  }
  return static_cast<double>(satisfied) / static_cast<double>(rules.size());
}

double iov(const ProcessGraph& g, const KnowledgeBase& kb) {
  auto validity = unit_io_validity(g, kb);
  if (validity.empty()) return 1.0;
  std::size_t valid = 0;
  for (const auto& [node, ok] : validity) {
    if (ok) ++valid;
  }
  return static_cast<double>(valid) / static_cast<double>(validity.size());
}

}  // namespace flowsynth
