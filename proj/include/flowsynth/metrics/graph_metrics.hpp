#pragma once

#include <vector>

#include "flowsynth/kbgraph/knowledge_base.hpp"
#include "flowsynth/kbgraph/process_graph.hpp"

namespace flowsynth {

// Satisfied critical paths / required critical paths; 1.0 for no rules.
// Throws Error(kUnresolvedRule) for rules that do not resolve against kb.
double cspc(const ProcessGraph& g, const std::vector<CriticalPathRule>& rules, const KnowledgeBase& kb);

// Nodes whose I/O rules all hold / nodes; 1.0 for the empty graph.
double iov(const ProcessGraph& g, const KnowledgeBase& kb);

}  // namespace flowsynth
