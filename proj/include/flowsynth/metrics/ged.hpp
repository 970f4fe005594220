#pragma once

#include <cstddef>

#include "flowsynth/kbgraph/process_graph.hpp"

namespace flowsynth {

// Edit costs. Node substitution costs 0 between nodes of the same unit and
// `node_substitute` otherwise; edge substitution costs 0 between equal
// material labels (or two unlabeled edges) and `edge_substitute` otherwise.
struct GedCosts {
  double node_insert = 1.0;
  double node_delete = 1.0;
  double node_substitute = 1.0;
  double edge_insert = 1.0;
  double edge_delete = 1.0;
  double edge_substitute = 1.0;
};

inline constexpr std::size_t kDefaultExactNodeLimit = 6;

// Minimum edit cost over every injective partial node mapping, with edge edits
// induced by the mapping. Exponential; throws Error(kSizeLimit) when either
// graph has more than `node_limit` nodes.
double exact_ged(const ProcessGraph& g1, const ProcessGraph& g2, const GedCosts& costs = {},
                 std::size_t node_limit = kDefaultExactNodeLimit);

// Upper bound on exact_ged(): bipartite node assignment over substitution
// costs augmented with each node's local edge structure, solved optimally,
// then improved by a bounded pairwise-swap search on the induced edit cost.
// Computed in both directions and the smaller bound kept, so it is symmetric.
double approx_ged(const ProcessGraph& g1, const ProcessGraph& g2, const GedCosts& costs = {});

// approx_ged() / max(|V1|, |V2|), clamped to [0, 1]. Two empty graphs give 0.
double approx_nged(const ProcessGraph& g1, const ProcessGraph& g2, const GedCosts& costs = {});

}  // namespace flowsynth
