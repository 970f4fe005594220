#include "flowsynth/synth/repair.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "flowsynth/kbgraph/constraints.hpp"

namespace flowsynth {

namespace {

enum class Status { kSatisfied, kFixable, kUnrepairable };

struct Fix {
  Status status = Status::kSatisfied;
  Edge edge;
};

bool compatible(const KnowledgeBase& kb, const Node& from, const Node& to, const std::string& m) {
  return from.id != to.id && kb.unit(from.unit).outputs.count(m) > 0 && kb.unit(to.unit).inputs.count(m) > 0;
}

Fix critical_fix(const ProcessGraph& g, const KnowledgeBase& kb, const CriticalPathRule& rule) {
  if (critical_path_satisfied(g, kb, rule)) return {};
  const auto sources = rule_source_nodes(g, kb, rule);
  const auto targets = rule_target_nodes(g, rule);
  std::vector<std::size_t> idx;
  for (const auto& s : sources) idx.push_back(g.index_of(s));
  const auto closure = forward_closure(g, idx);
  for (std::size_t x = 0; x < g.node_count(); ++x) {  // nodes are sorted by id
    if (!closure[x]) continue;
    const Node& from = g.nodes()[x];
    for (const auto& m : kb.unit(from.unit).outputs) {
      for (const auto& t : targets) {
        const Node& to = g.nodes()[g.index_of(t)];
        Edge e{from.id, to.id, m};
        if (compatible(kb, from, to, m) && !g.has_edge(e)) return {Status::kFixable, e};
      }
    }
  }
  return {Status::kUnrepairable, {}};
}

Fix io_fix(const ProcessGraph& g, const KnowledgeBase& kb, std::size_t node, const IoRule& rule) {
  if (rule.kind == IoRuleKind::kForbidsInput || io_rule_holds(g, kb, node, rule)) return {};
  const Node& self = g.nodes()[node];
  for (const auto& other : g.nodes()) {
    Edge e = rule.kind == IoRuleKind::kRequiresInput ? Edge{other.id, self.id, rule.material}
                                                     : Edge{self.id, other.id, rule.material};
    const Node& from = rule.kind == IoRuleKind::kRequiresInput ? other : self;
    const Node& to = rule.kind == IoRuleKind::kRequiresInput ? self : other;
    if (compatible(kb, from, to, rule.material) && !g.has_edge(e)) return {Status::kFixable, e};
  }
  return {Status::kUnrepairable, {}};
}

std::string io_rule_label(const Node& n, const IoRule& rule) {
  return "io_rule:" + n.id + ":" + (rule.kind == IoRuleKind::kRequiresInput ? "requires_input" : "requires_output") +
         ":" + rule.material;
}

std::vector<const CriticalPathRule*> by_id(const std::vector<CriticalPathRule>& rules) {
  std::vector<const CriticalPathRule*> out;
  for (const auto& r : rules) out.push_back(&r);
  std::sort(out.begin(), out.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
  return out;
}

// Visits every rule in repair order with its current status. `visit` returns
// the graph to continue with (so additions are seen by later rules).
template <typename Visit>
ProcessGraph walk_rules(ProcessGraph g, const KnowledgeBase& kb, const std::vector<CriticalPathRule>& rules,
                        Visit visit) {
  for (const auto* rule : by_id(rules)) {
    g = visit(g, critical_fix(g, kb, *rule), "critical_path:" + rule->id);
  }
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const Node node = g.nodes()[i];
    for (const auto& rule : kb.unit(node.unit).io_rules) {
      g = visit(g, io_fix(g, kb, g.index_of(node.id), rule), io_rule_label(node, rule));
    }
  }
  return g;
}

nlohmann::ordered_json edges_json(const std::vector<Edge>& edges) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : edges) {
    nlohmann::ordered_json j{{"from", e.from}, {"to", e.to}};
    if (e.material) j["material"] = *e.material;
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace

nlohmann::ordered_json trace_to_json(const RepairTrace& trace) {
  auto iterations = nlohmann::ordered_json::array();
  for (const auto& it : trace.iterations) {
    iterations.push_back({{"violations_before", it.violations_before},
                          {"edges_removed", edges_json(it.edges_removed)},
                          {"edges_added", edges_json(it.edges_added)}});
  }
  return {{"converged", trace.converged},
          {"iterations", iterations},
          {"unrepairable", trace.unrepairable},
          {"proposal_dropped", trace.proposal_dropped}};
}

std::vector<CriticalPathRule> applicable_rules(const ProcessGraph& g, const KnowledgeBase& kb) {
  std::vector<CriticalPathRule> out;
  for (const auto& rule : kb.critical_paths()) {
    if (!rule_target_nodes(g, rule).empty() && !rule_source_nodes(g, kb, rule).empty()) out.push_back(rule);
  }
  return out;
}

std::size_t pending_repairs(const ProcessGraph& g, const KnowledgeBase& kb,
                            const std::vector<CriticalPathRule>& rules) {
  std::size_t pending = check_phi(g, kb).violations.size();
  walk_rules(g, kb, rules, [&](const ProcessGraph& cur, const Fix& fix, const std::string&) {
    if (fix.status == Status::kFixable) ++pending;
    return cur;
  });
  return pending;
}

std::pair<ProcessGraph, RepairTrace> repair_loop(const ProcessGraph& g, const KnowledgeBase& kb,
                                                 const std::vector<CriticalPathRule>& rules, std::size_t max_iters) {
  require_known_units(g, kb);
  for (const auto& rule : rules) require_rule_resolves(kb, rule);
  RepairTrace trace;
  ProcessGraph cur = g;
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    RepairIteration it;
    it.violations_before = pending_repairs(cur, kb, rules);
    std::set<Edge> bad;
    for (const auto& v : check_phi(cur, kb).violations) bad.insert(v.edge);
    if (!bad.empty()) {
      cur = cur.without_edges([&](const Edge& e) { return bad.count(e) > 0; });
      it.edges_removed.assign(bad.begin(), bad.end());
    }
    cur = walk_rules(cur, kb, rules, [&](const ProcessGraph& now, const Fix& fix, const std::string&) {
      if (fix.status != Status::kFixable) return now;
      it.edges_added.push_back(fix.edge);
      return now.with_edges({fix.edge});
    });
    if (it.edges_removed.empty() && it.edges_added.empty()) break;
    trace.iterations.push_back(std::move(it));
  }
  walk_rules(cur, kb, rules, [&](const ProcessGraph& now, const Fix& fix, const std::string& label) {
    if (fix.status == Status::kUnrepairable) trace.unrepairable.push_back(label);
    return now;
  });
  trace.converged = check_phi(cur, kb).satisfied && pending_repairs(cur, kb, rules) == 0;
  return {std::move(cur), std::move(trace)};
}

}  // namespace flowsynth
