#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "flowsynth/kbgraph/knowledge_base.hpp"
#include "flowsynth/kbgraph/process_graph.hpp"

namespace flowsynth {

struct PhiViolation {
  Edge edge;
  std::string reason;
};

struct PhiReport {
  bool satisfied = true;
  std::vector<PhiViolation> violations;
  std::size_t checked_edges = 0;
};

// Material compatibility of a single edge: Out(unit(from)) ∩ In(unit(to)) must
// be nonempty, and a labeled edge's material must lie in that intersection.
// Returns an empty string when the edge is compatible, otherwise the reason.
std::string edge_incompatibility(const ProcessGraph& g, const KnowledgeBase& kb, const Edge& e);

// Every node's unit must exist in the knowledge base (Error kUnknownUnit).
void require_known_units(const ProcessGraph& g, const KnowledgeBase& kb);

PhiReport check_phi(const ProcessGraph& g, const KnowledgeBase& kb);

// True when the edge brings material `m` into its target: either labeled `m`,
// or unlabeled from a unit that emits `m`.
bool edge_delivers(const ProcessGraph& g, const KnowledgeBase& kb, const Edge& e, const std::string& m);
// True when the edge carries `m` out of its source: labeled `m`, or unlabeled
// towards a unit that accepts `m`.
bool edge_carries_out(const ProcessGraph& g, const KnowledgeBase& kb, const Edge& e, const std::string& m);

bool io_rule_holds(const ProcessGraph& g, const KnowledgeBase& kb, std::size_t node_index, const IoRule& rule);

std::map<std::string, bool> unit_io_validity(const ProcessGraph& g, const KnowledgeBase& kb);

// Node indices reachable from any of `sources` (sources included).
std::vector<bool> forward_closure(const ProcessGraph& g, const std::vector<std::size_t>& sources);

// Directed reachability between node-id sets. A node in both sets counts as a
// zero-length path. Throws Error(kUnknownNode) for ids not in the graph.
bool reachable(const ProcessGraph& g, const std::set<std::string>& sources, const std::set<std::string>& targets);

// Node ids matched by a rule's source predicate / target unit.
std::set<std::string> rule_source_nodes(const ProcessGraph& g, const KnowledgeBase& kb, const CriticalPathRule& rule);
std::set<std::string> rule_target_nodes(const ProcessGraph& g, const CriticalPathRule& rule);

// Throws Error(kUnresolvedRule) when the rule references ids absent from kb.
void require_rule_resolves(const KnowledgeBase& kb, const CriticalPathRule& rule);

bool critical_path_satisfied(const ProcessGraph& g, const KnowledgeBase& kb, const CriticalPathRule& rule);

}  // namespace flowsynth
