#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowsynth/kbgraph/knowledge_base.hpp"
#include "flowsynth/kbgraph/process_graph.hpp"

namespace flowsynth {

struct RepairIteration {
  std::size_t violations_before = 0;  // Φ violations + repairable pending rules
  std::vector<Edge> edges_removed;
  std::vector<Edge> edges_added;
};

struct RepairTrace {
  std::vector<RepairIteration> iterations;  // productive iterations only
  bool converged = false;
  // Rules that no Φ-compatible edge can satisfy, e.g. "io_rule:dht:requires_input:hydrogen".
  std::vector<std::string> unrepairable;
  // Proposal lines that could not be turned into edges (filled by synthesize).
  std::size_t proposal_dropped = 0;
};

nlohmann::ordered_json trace_to_json(const RepairTrace& trace);

// Rules whose target unit is in the graph and whose source predicate is
// matched by at least one of its nodes.
std::vector<CriticalPathRule> applicable_rules(const ProcessGraph& g, const KnowledgeBase& kb);

// Number of pending repairs: Φ-violating edges plus unsatisfied critical
// paths and requires_input/requires_output rules that one compatible edge
// could fix.
std::size_t pending_repairs(const ProcessGraph& g, const KnowledgeBase& kb, const std::vector<CriticalPathRule>& rules);

// Each iteration removes every Φ-violating edge, then walks the unsatisfied
// critical paths (by id) and the nodes' requires_input / requires_output rules
// (by node id) and adds one labeled edge per rule:
//  - critical path: smallest (source, material, target) with source in the
//    forward closure of the rule's source nodes and target a target node;
//  - requires_input m on t: smallest source node emitting m;
//  - requires_output m on s: smallest target node accepting m.
// Only edges with material in Out(source) ∩ In(target) are added, so the
// output always satisfies Φ. Stops at a fixpoint or after max_iters
// productive iterations.
std::pair<ProcessGraph, RepairTrace> repair_loop(const ProcessGraph& g, const KnowledgeBase& kb,
                                                 const std::vector<CriticalPathRule>& rules, std::size_t max_iters);

}  // namespace flowsynth
