#include "flowsynth/kbgraph/constraints.hpp"

#include <deque>

#include "flowsynth/errors.hpp"

namespace flowsynth {

void require_known_units(const ProcessGraph& g, const KnowledgeBase& kb) {
  for (const auto& n : g.nodes()) {
    if (!kb.has_unit(n.unit)) {
      throw Error(ErrorCode::kUnknownUnit, "node \"" + n.id + "\" references unknown unit \"" + n.unit + "\"", n.unit);
    }
  }
}

std::string edge_incompatibility(const ProcessGraph& g, const KnowledgeBase& kb, const Edge& e) {
  const UnitSpec& src = kb.unit(g.unit_of(e.from));
  const UnitSpec& dst = kb.unit(g.unit_of(e.to));
  if (!shares_material(src.outputs, dst.inputs)) {
    return "Out(" + src.id + ") ∩ In(" + dst.id + ") is empty";
  }
  if (e.material) {
    if (src.outputs.count(*e.material) == 0) return "material \"" + *e.material + "\" not in Out(" + src.id + ")";
    if (dst.inputs.count(*e.material) == 0) return "material \"" + *e.material + "\" not in In(" + dst.id + ")";
  }
  return {};
}

PhiReport check_phi(const ProcessGraph& g, const KnowledgeBase& kb) {
  require_known_units(g, kb);
  PhiReport report;
  for (const auto& e : g.edges()) {
    ++report.checked_edges;
    std::string reason = edge_incompatibility(g, kb, e);
    if (!reason.empty()) report.violations.push_back({e, std::move(reason)});
  }
  report.satisfied = report.violations.empty();
  return report;
}

bool edge_delivers(const ProcessGraph& g, const KnowledgeBase& kb, const Edge& e, const std::string& m) {
  if (e.material) return *e.material == m;
  return kb.unit(g.unit_of(e.from)).outputs.count(m) > 0;
}

bool edge_carries_out(const ProcessGraph& g, const KnowledgeBase& kb, const Edge& e, const std::string& m) {
  if (e.material) return *e.material == m;
  return kb.unit(g.unit_of(e.to)).inputs.count(m) > 0;
}

bool io_rule_holds(const ProcessGraph& g, const KnowledgeBase& kb, std::size_t node_index, const IoRule& rule) {
  const auto& edges = g.edges();
  switch (rule.kind) {
    case IoRuleKind::kRequiresInput:
      for (std::size_t k : g.in_edges(node_index)) {
        if (edge_delivers(g, kb, edges[k], rule.material)) return true;
      }
      return false;
    case IoRuleKind::kRequiresOutput:
      for (std::size_t k : g.out_edges(node_index)) {
        if (edge_carries_out(g, kb, edges[k], rule.material)) return true;
      }
      return false;
    case IoRuleKind::kForbidsInput:
      for (std::size_t k : g.in_edges(node_index)) {
        if (edge_delivers(g, kb, edges[k], rule.material)) return false;
      }
      return true;
  }
  return false;
}

std::map<std::string, bool> unit_io_validity(const ProcessGraph& g, const KnowledgeBase& kb) {
  require_known_units(g, kb);
  std::map<std::string, bool> valid;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const UnitSpec& spec = kb.unit(g.nodes()[i].unit);
    bool ok = true;
    for (const auto& rule : spec.io_rules) {
      if (!io_rule_holds(g, kb, i, rule)) {
        ok = false;
        break;
      }
    }
    valid[g.nodes()[i].id] = ok;
  }
  return valid;
}

std::vector<bool> forward_closure(const ProcessGraph& g, const std::vector<std::size_t>& sources) {
  std::vector<bool> seen(g.node_count(), false);
  std::deque<std::size_t> queue;
  for (std::size_t s : sources) {
    if (!seen[s]) {
      seen[s] = true;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t k : g.out_edges(v)) {
      std::size_t w = g.index_of(g.edges()[k].to);
      if (!seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
    }
  }
  return seen;
}

bool reachable(const ProcessGraph& g, const std::set<std::string>& sources, const std::set<std::string>& targets) {
  std::vector<std::size_t> src;
  for (const auto& s : sources) src.push_back(g.index_of(s));
  std::vector<std::size_t> dst;
  for (const auto& t : targets) dst.push_back(g.index_of(t));
  auto seen = forward_closure(g, src);
  for (std::size_t t : dst) {
    if (seen[t]) return true;
  }
  return false;
}

void require_rule_resolves(const KnowledgeBase& kb, const CriticalPathRule& rule) {
  const bool source_ok = rule.source.kind == SourcePredicate::Kind::kUnit ? kb.has_unit(rule.source.id)
                                                                          : kb.has_material(rule.source.id);
  if (!source_ok) {
    throw Error(ErrorCode::kUnresolvedRule,
                "critical path \"" + rule.id + "\": unknown source \"" + rule.source.id + "\"", rule.id);
  }
  if (!kb.has_unit(rule.target_unit)) {
    throw Error(ErrorCode::kUnresolvedRule,
                "critical path \"" + rule.id + "\": unknown target unit \"" + rule.target_unit + "\"", rule.id);
  }
}

std::set<std::string> rule_source_nodes(const ProcessGraph& g, const KnowledgeBase& kb, const CriticalPathRule& rule) {
  std::set<std::string> out;
  for (const auto& n : g.nodes()) {
    const bool match = rule.source.kind == SourcePredicate::Kind::kUnit
                           ? n.unit == rule.source.id
                           : kb.unit(n.unit).outputs.count(rule.source.id) > 0;
    if (match) out.insert(n.id);
  }
  return out;
}

std::set<std::string> rule_target_nodes(const ProcessGraph& g, const CriticalPathRule& rule) {
  std::set<std::string> out;
  for (const auto& n : g.nodes()) {
    if (n.unit == rule.target_unit) out.insert(n.id);
  }
  return out;
}

bool critical_path_satisfied(const ProcessGraph& g, const KnowledgeBase& kb, const CriticalPathRule& rule) {
  require_rule_resolves(kb, rule);
  return reachable(g, rule_source_nodes(g, kb, rule), rule_target_nodes(g, rule));
}

}  // namespace flowsynth
