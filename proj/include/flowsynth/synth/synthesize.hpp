#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flowsynth/adapter/generator.hpp"
#include "flowsynth/kbgraph/knowledge_base.hpp"
#include "flowsynth/kbgraph/process_graph.hpp"
#include "flowsynth/metrics/selection.hpp"
#include "flowsynth/synth/repair.hpp"

namespace flowsynth {

struct ScoredMotif {
  const Motif* motif;
  double overlap;  // |motif ∩ v| / |motif|
};

struct ContextBundle {
  std::vector<UnitSpec> unit_schemas;  // sorted by id
  std::vector<ScoredMotif> motifs;     // best first
  std::vector<std::string> exemplars;  // "a -> b : m", one per motif edge
  std::size_t n = 0;                   // == motifs.size()
};

// Schemas for every unit of v plus the top-n motifs by overlap ratio, ties
// broken by motif id. Throws Error(kUnknownUnit) for units missing from kb.
ContextBundle retrieve_context(const UnitSelection& v, const KnowledgeBase& kb, std::size_t n);

// Nodes of the graph built over v: one node per unit, node id = unit id.
std::vector<Node> nodes_for(const UnitSelection& v);

// For every ordered pair (a, b) of v with Out(a) ∩ In(b) nonempty, the edge
// a -> b labeled with the smallest shared material.
std::vector<Edge> heuristic_proposer(const UnitSelection& v, const KnowledgeBase& kb, std::uint64_t seed);

struct ParsedProposal {
  std::vector<Edge> edges;  // sorted, unique
  std::size_t dropped = 0;
};

// Accepts either JSON ({"edges": [...]} or a bare list of {"from","to","material"?})
// or one "a -> b" / "a -> b : material" per line; other prose lines are
// ignored. Endpoints are canonicalized against kb and must be in v. Edges
// with unknown endpoints or materials, self-loops and malformed entries are
// dropped and counted. Duplicates collapse silently.
ParsedProposal parse_proposed_edges(std::string_view text, const UnitSelection& v, const KnowledgeBase& kb);

enum class ProposerKind { kHeuristic, kMock, kRemote };
enum class RationaleMode { kNone, kReasoning, kKeyTopology, kAll };

std::string_view proposer_kind_name(ProposerKind kind);
ProposerKind parse_proposer_kind(std::string_view name);
std::string_view rationale_mode_name(RationaleMode mode);
RationaleMode parse_rationale_mode(std::string_view name);

struct SynthConfig {
  std::size_t context_n = 3;
  std::size_t max_repair_iters = 10;
  std::uint64_t seed = 0;
  ProposerKind proposer = ProposerKind::kHeuristic;
  RationaleMode rationale_mode = RationaleMode::kAll;
};

void validate_synth_config(const SynthConfig& cfg);

// Prompt sent to mock/remote proposers. Unit schemas are always included;
// motif edges are added for key_topology/all and the Stage-1 rationale for
// reasoning/all.
std::string build_synthesis_prompt(const ContextBundle& ctx, RationaleMode mode, std::string_view rationale);

// retrieve_context -> proposer -> parse -> repair_loop over the critical
// paths applicable to v. `proposer` is required for kMock and kRemote and
// ignored for kHeuristic. Generator errors propagate.
std::pair<ProcessGraph, RepairTrace> synthesize(const UnitSelection& v, const KnowledgeBase& kb,
                                                const SynthConfig& cfg, TextGenerator* proposer,
                                                std::string_view rationale = {});

}  // namespace flowsynth
